#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "selmer/arithmetic.hpp"
#include "selmer/curve.hpp"

namespace selmer {

struct EnumerationTooLarge : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline constexpr std::size_t kMaxPlaces = 30;

struct SelmerGroup {
    unsigned dim = 0;
    std::vector<arith::GlobalClass> basis;
};

/// Brute-force Selmer data for one twist: every class generated by -1 and the
/// finite primes of T_d is tested against the local image at every place of T_d.
struct SelmerResult {
    arith::i64 d = 1;
    SelmerGroup phi;
    SelmerGroup phihat;
    [[nodiscard]] int u() const noexcept { return static_cast<int>(phi.dim) - static_cast<int>(phihat.dim); }
};

/// `extra_primes` (good primes not dividing d) are added to the generators with
/// their unramified local condition; the answer must not change.
/// Throws EnumerationTooLarge when |T_d| plus the extra primes exceeds kMaxPlaces.
SelmerGroup selmer_group(const CurveContext& ctx, arith::i64 d, Isogeny which,
                         std::span<const arith::u64> extra_primes = {});

SelmerResult brute_force_selmer(const CurveContext& ctx, arith::i64 d);

/// Places of T_d: infinity, then finite primes of 2 * disc * d ascending.
std::vector<arith::Place> places_of_twist(const CurveContext& ctx, arith::i64 d);

/// Sum over T_d of the additive Hilbert symbols (s, t)_v.
unsigned global_pairing(const CurveContext& ctx, arith::i64 d, const arith::GlobalClass& s, const arith::GlobalClass& t);

}  // namespace selmer
