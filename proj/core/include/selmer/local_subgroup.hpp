#pragma once

#include <string>
#include <vector>

#include "selmer/arithmetic.hpp"

namespace selmer {

/// Subgroup of Q_v^x / (Q_v^x)^2, stored as a membership mask over the
/// 2^ambient_dim classes (bit i set iff the class with bits i is a member).
///
/// The basis is canonical: a basis of the valuation-zero part in increasing
/// bit order, followed by the smallest member of odd valuation if there is
/// one. So the valuation character is nonzero on at most the last element.
class LocalSubgroup {
public:
    LocalSubgroup() = default;

    static LocalSubgroup trivial(arith::Place v);
    static LocalSubgroup full(arith::Place v);
    /// Valuation-zero classes (sign +1 only at the real place).
    static LocalSubgroup units(arith::Place v);
    static LocalSubgroup span(arith::Place v, const std::vector<arith::SquareClass>& gens);
    /// Throws std::invalid_argument if `mask` is not closed under addition or lacks the identity.
    static LocalSubgroup from_mask(arith::Place v, unsigned mask);

    [[nodiscard]] arith::Place place() const noexcept { return place_; }
    [[nodiscard]] unsigned mask() const noexcept { return mask_; }
    [[nodiscard]] unsigned dim() const noexcept { return static_cast<unsigned>(basis_.size()); }
    [[nodiscard]] const std::vector<arith::SquareClass>& basis() const noexcept { return basis_; }
    [[nodiscard]] bool contains(const arith::SquareClass& c) const noexcept { return (mask_ >> c.bits) & 1U; }
    [[nodiscard]] bool contains_bits(unsigned bits) const noexcept { return (mask_ >> bits) & 1U; }
    [[nodiscard]] std::vector<arith::SquareClass> elements() const;

    /// Orthogonal complement under the Hilbert pairing.
    [[nodiscard]] LocalSubgroup annihilator() const;
    [[nodiscard]] bool orthogonal_to(const LocalSubgroup& other) const;

    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const LocalSubgroup& a, const LocalSubgroup& b) noexcept {
        return a.place_ == b.place_ && a.mask_ == b.mask_;
    }

private:
    LocalSubgroup(arith::Place v, unsigned mask);

    arith::Place place_;
    unsigned mask_ = 1;
    std::vector<arith::SquareClass> basis_;
};

}  // namespace selmer
