#include "selmer/cl_constants.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "selmer/arithmetic.hpp"

namespace selmer::cl {

namespace {

// prod_{s=1}^{n} (1 - p^-s)
Real partial_product(std::uint64_t p, long n) {
    const Real inv = 1.0L / static_cast<Real>(p);
    Real pw = 1.0L, prod = 1.0L;
    for (long s = 1; s <= n; ++s) {
        pw *= inv;
        prod *= 1.0L - pw;
    }
    return prod;
}

}  // namespace

Real alpha_prime(std::uint64_t p, int u, int r, unsigned precision) {
    if (!arith::is_prime(p)) throw std::invalid_argument("alpha_prime: p must be prime");
    if (precision == 0) throw std::invalid_argument("alpha_prime: precision must be >= 1");
    if (r < 0 || r + u < 0) return 0;
    const Real num = partial_product(p, precision);
    const Real den = partial_product(p, r) * partial_product(p, r + u);
    const Real expo = -static_cast<Real>(r) * static_cast<Real>(r + u);
    return std::pow(static_cast<Real>(p), expo) * num / den;
}

Real alpha(int r, int u, unsigned precision) {
    if (precision == 0) throw std::invalid_argument("alpha: precision must be >= 1");
    if (r < std::max(1, u + 1)) return 0;
    const Real num = partial_product(2, precision);
    const Real den = partial_product(2, r - 1) * partial_product(2, r - u - 1);
    const Real expo = -static_cast<Real>(r - 1) * static_cast<Real>(r - u - 1);
    return std::pow(2.0L, expo) * num / den;
}

AlphaTable alpha_table(int u, int r_max, unsigned precision) {
    if (r_max < std::max(1, u + 1)) throw std::invalid_argument("alpha_table: r_max below support");
    AlphaTable t;
    t.u = u;
    t.r_max = r_max;
    t.values.resize(static_cast<std::size_t>(r_max) + 1);
    Real sum = 0;
    for (int r = 0; r <= r_max; ++r) sum += t.values[static_cast<std::size_t>(r)] = alpha(r, u, precision);
    t.tail_mass = 1.0L - sum;
    return t;
}

AlphaTable alpha_prime_table(std::uint64_t p, int u, int r_max, unsigned precision) {
    if (r_max < 0) throw std::invalid_argument("alpha_prime_table: r_max must be >= 0");
    AlphaTable t;
    t.u = u;
    t.r_max = r_max;
    t.values.resize(static_cast<std::size_t>(r_max) + 1);
    Real sum = 0;
    for (int r = 0; r <= r_max; ++r) sum += t.values[static_cast<std::size_t>(r)] = alpha_prime(p, u, r, precision);
    t.tail_mass = 1.0L - sum;
    return t;
}

Real alpha_moment(int k, int u, int r_max, unsigned precision) {
    Real sum = 0;
    for (int r = std::max(1, u + 1); r <= r_max; ++r) sum += std::pow(2.0L, static_cast<Real>(k) * r) * alpha(r, u, precision);
    return sum;
}

}  // namespace selmer::cl
