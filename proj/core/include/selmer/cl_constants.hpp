#pragma once

#include <cstdint>
#include <vector>

namespace selmer::cl {

using Real = long double;

/// Number of factors kept from the infinite product prod_{s>=1}(1 - p^-s).
inline constexpr unsigned kDefaultPrecision = 64;

/// Cohen-Lenstra u-probability that a p-group has p-rank r.
/// Zero when r < 0 or r + u < 0. Throws std::invalid_argument for non-prime p or precision 0.
Real alpha_prime(std::uint64_t p, int u, int r, unsigned precision = kDefaultPrecision);

/// Limiting probability that the phi-Selmer rank is r among twists with Tamagawa exponent u.
/// Zero below r = max(1, u + 1).
Real alpha(int r, int u, unsigned precision = kDefaultPrecision);

struct AlphaTable {
    int u = 0;
    int r_max = 0;
    std::vector<Real> values;  // indexed by r, 0..r_max
    Real tail_mass = 0;        // 1 - sum(values)

    [[nodiscard]] Real at(int r) const { return r < 0 || r > r_max ? 0 : values[static_cast<std::size_t>(r)]; }
};

/// Requires r_max >= max(1, u + 1).
AlphaTable alpha_table(int u, int r_max, unsigned precision = kDefaultPrecision);

/// Same layout as alpha_table but holding alpha_prime(p, u, r).
AlphaTable alpha_prime_table(std::uint64_t p, int u, int r_max, unsigned precision = kDefaultPrecision);

/// sum_r 2^{k r} alpha(r, u), truncated at r_max.
Real alpha_moment(int k, int u, int r_max = 40, unsigned precision = kDefaultPrecision);

}  // namespace selmer::cl
