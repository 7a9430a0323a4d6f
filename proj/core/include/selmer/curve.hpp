#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "selmer/arithmetic.hpp"
#include "selmer/local_subgroup.hpp"

namespace selmer {

enum class PrimeType { Type1 = 1, Type2 = 2, Type3 = 3, Type4 = 4 };

inline int type_index(PrimeType t) noexcept { return static_cast<int>(t); }
std::string to_string(PrimeType t);

/// Which Kummer map: phi: E^d -> E'^d, or the dual phi-hat: E'^d -> E^d.
enum class Isogeny { Phi, PhiHat };

class CurveRejected : public std::invalid_argument {
public:
    enum class Reason { Singular, FullTwoTorsion, CyclicFourIsogeny, TooLarge };
    CurveRejected(Reason r, const std::string& what) : std::invalid_argument(what), reason_(r) {}
    [[nodiscard]] Reason reason() const noexcept { return reason_; }

private:
    Reason reason_;
};

/// E: y^2 = x^3 + A x^2 + B x with a single rational 2-torsion point and no
/// cyclic 4-isogeny, together with its bad places and a memo of local images.
///
/// Copies share the memo. The memo is internally locked, so one context can
/// serve many threads.
class CurveContext {
public:
    /// Throws CurveRejected naming the failed hypothesis.
    CurveContext(arith::i64 A, arith::i64 B);

    [[nodiscard]] arith::i64 A() const noexcept { return A_; }
    [[nodiscard]] arith::i64 B() const noexcept { return B_; }
    /// Squarefree kernel of A^2 - 4B.
    [[nodiscard]] arith::i64 delta() const noexcept { return delta_; }
    /// Squarefree kernel of B.
    [[nodiscard]] arith::i64 delta_prime() const noexcept { return delta_prime_; }
    /// A^2 - 4B itself.
    [[nodiscard]] arith::i64 disc_quadratic() const noexcept { return A_ * A_ - 4 * B_; }
    /// Finite primes dividing 2 * 16 B^2 (A^2 - 4B), ascending (2 first).
    [[nodiscard]] const std::vector<arith::u64>& bad_primes() const noexcept { return bad_primes_; }
    /// Infinity followed by bad_primes().
    [[nodiscard]] const std::vector<arith::Place>& bad_places() const noexcept { return bad_places_; }
    [[nodiscard]] bool is_bad_prime(arith::u64 p) const noexcept;
    /// 8 times the product of the odd bad primes. Residues mod D determine every
    /// bad-place character of a good prime and its type.
    [[nodiscard]] arith::u64 D() const noexcept { return D_; }
    [[nodiscard]] std::string to_string() const;

    /// Throws std::invalid_argument for p = 2 or p | disc.
    [[nodiscard]] PrimeType classify_prime(arith::u64 p) const;
    /// Type of a good prime from its residue mod D().
    [[nodiscard]] PrimeType classify_residue(arith::u64 residue_mod_D) const;

    /// Additive Legendre symbol of A + 2 sqrt(B) at a good prime where B is a square
    /// (types 1 and 3). For type 1 it does not depend on the root chosen.
    [[nodiscard]] unsigned lambda(arith::u64 p) const;

    /// Local image at v of the Kummer map of the twist by d (d squarefree).
    /// v must be infinity, a bad prime, or a prime dividing d.
    [[nodiscard]] LocalSubgroup local_image(arith::i64 d, arith::Place v, Isogeny which = Isogeny::Phi) const;
    [[nodiscard]] LocalSubgroup local_image_dual(arith::i64 d, arith::Place v) const {
        return local_image(d, v, Isogeny::PhiHat);
    }

    /// Image at a good prime p | d from the type of p (closed form).
    [[nodiscard]] LocalSubgroup twisted_image(arith::i64 d, arith::u64 p, Isogeny which = Isogeny::Phi) const;
    /// Same image by direct point search, bypassing the closed form and the memo.
    [[nodiscard]] LocalSubgroup searched_image(arith::i64 d, arith::Place v, Isogeny which = Isogeny::Phi) const;

    /// Image at a bad place for a twist whose class at v is `d_class`.
    [[nodiscard]] LocalSubgroup bad_place_image(const arith::SquareClass& d_class, Isogeny which = Isogeny::Phi) const;

    /// sum over bad places v of (dim W_v^d - 1).
    [[nodiscard]] int c_d(arith::i64 d) const;
    /// Same, from the classes of d at the bad places (ordered as bad_places()).
    [[nodiscard]] int c_from_classes(const std::vector<arith::SquareClass>& d_classes) const;
    /// sum over v in T_d of (dim W_v^d - 1).
    [[nodiscard]] int tamagawa_ord2(arith::i64 d) const;

    [[nodiscard]] std::size_t cache_size() const;

private:
    struct Cache {
        std::mutex mu;
        std::map<std::tuple<arith::u64, unsigned, int>, LocalSubgroup> images;
    };

    arith::i64 A_, B_;
    arith::i64 delta_, delta_prime_;
    std::vector<arith::u64> bad_primes_;
    std::vector<arith::Place> bad_places_;
    arith::u64 D_ = 8;
    std::shared_ptr<Cache> cache_;
};

}  // namespace selmer
