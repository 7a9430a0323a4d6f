#include "selmer/torsor.hpp"

#include <limits>

namespace selmer::local {

using arith::i128;
using arith::i64;
using arith::Place;
using arith::SquareClass;
using arith::u64;

LocalSubgroup real_image(i64 a, i64 b) {
    const Place inf = Place::infinity();
    if (b == 0) throw std::invalid_argument("real_image: b = 0");
    // X < 0 lies in the image iff X^2 - 2aX + a^2 - 4b <= 0 somewhere on X < 0,
    // i.e. b > 0 and the smaller root a - 2 sqrt(b) is negative.
    const bool neg = b > 0 && (a <= 0 || static_cast<i128>(a) * a < static_cast<i128>(4) * b);
    return neg ? LocalSubgroup::full(inf) : LocalSubgroup::trivial(inf);
}

namespace {

struct Modulus {
    u64 p;
    u64 m;          // p^M
    unsigned M;
};

Modulus big_modulus(u64 p) {
    Modulus out{p, 1, 0};
    while (out.m <= (u64{1} << 62) / p) {
        out.m *= p;
        ++out.M;
    }
    return out;
}

u64 reduce(i128 x, u64 m) {
    i128 r = x % static_cast<i128>(m);
    if (r < 0) r += m;
    return static_cast<u64>(r);
}

// Is the integer with residue g mod p^M a nonzero square in Q_p? nullopt if undecidable at this precision.
std::optional<bool> square_at(u64 g, const Modulus& md) {
    if (g == 0) return std::nullopt;
    unsigned v = 0;
    while (g % md.p == 0) {
        g /= md.p;
        ++v;
    }
    const unsigned need = md.p == 2 ? 3 : 1;
    if (v + need > md.M) return std::nullopt;
    if (v & 1U) return false;
    if (md.p == 2) return (g & 7U) == 1;
    return arith::jacobi(static_cast<i64>(g % md.p), md.p) == 1;
}

}  // namespace

LocalSubgroup search_image(i64 a, i64 b, Place v, unsigned digits) {
    if (v.is_infinite()) return real_image(a, b);
    const u64 p = v.p();
    const i128 a2 = -2 * static_cast<i128>(a);
    const i128 a4 = static_cast<i128>(a) * a - 4 * static_cast<i128>(b);
    if (a4 == 0 || b == 0) throw std::invalid_argument("search_image: singular curve");
    if (a4 > std::numeric_limits<i64>::max() || a4 < std::numeric_limits<i64>::min())
        throw std::overflow_error("search_image: coefficients too large");

    const Modulus md = big_modulus(p);
    const u64 A2 = reduce(a2, md.m), A4 = reduce(a4, md.m);
    const int kmax = static_cast<int>(arith::valuation(static_cast<i64>(a4), p)) + 3;

    u64 span = 1;
    for (unsigned i = 0; i < digits; ++i) span *= p;

    std::vector<SquareClass> found{arith::square_class(1, v), arith::square_class(static_cast<i64>(a4), v)};
    unsigned seen = 0;
    for (const auto& c : found) seen |= 1U << c.bits;
    const unsigned everything = (1U << (1U << v.ambient_dim())) - 1U;

    auto mm = [&](u64 x, u64 y) { return arith::mulmod(x, y, md.m); };
    for (int k = -3; k <= kmax && (seen != everything); ++k) {
        const unsigned j = static_cast<unsigned>(k < 0 ? -k : k);
        u64 pj = 1;
        for (unsigned i = 0; i < j; ++i) pj = mm(pj, p);
        for (u64 m = 1; m < span; ++m) {
            if (m % p == 0) continue;
            const u64 mr = m % md.m;
            const SquareClass cls = SquareClass::from_parts(v, j & 1U, static_cast<i64>(m % (p == 2 ? 8 : p)));
            if ((seen >> cls.bits) & 1U) continue;
            u64 g;
            if (k >= 0) {
                // g(X) = X^3 + a2 X^2 + a4 X at X = p^k m
                const u64 X = mm(pj, mr);
                g = mm(X, (mm(X, X) + mm(A2, X) + A4) % md.m);
            } else {
                // p^{4j} g(m / p^j) = m^3 p^j + a2 m^2 p^{2j} + a4 m p^{3j}
                const u64 m2 = mm(mr, mr);
                const u64 pj2 = mm(pj, pj);
                g = (mm(mm(m2, mr), pj) + mm(mm(A2, m2), pj2)) % md.m;
                g = (g + mm(mm(A4, mr), mm(pj2, pj))) % md.m;
            }
            auto sq = square_at(g, md);
            if (sq && *sq) {
                seen |= 1U << cls.bits;
                found.push_back(cls);
            }
        }
    }
    return LocalSubgroup::span(v, found);
}

KummerPair kummer_pair(i64 a, i64 b, Place v) {
    const i64 a_dual = -2 * a;
    const i128 b_dual = static_cast<i128>(a) * a - 4 * static_cast<i128>(b);
    if (b_dual > std::numeric_limits<i64>::max() || b_dual < std::numeric_limits<i64>::min())
        throw std::overflow_error("kummer_pair: coefficients too large");
    if (v.is_infinite()) return {real_image(a, b), real_image(a_dual, static_cast<i64>(b_dual))};

    const u64 p = v.p();
    unsigned digits = 1;
    u64 span = p;
    while (span < 16) {
        span *= p;
        ++digits;
    }
    for (; span <= (u64{1} << 22); span *= p, ++digits) {
        KummerPair out{search_image(a, b, v, digits), search_image(a_dual, static_cast<i64>(b_dual), v, digits)};
        if (out.image.dim() + out.dual.dim() == v.ambient_dim() && out.image.orthogonal_to(out.dual)) return out;
    }
    throw SearchFailed("kummer_pair: no duality certificate at p = " + std::to_string(p) + " for (a, b) = (" +
                       std::to_string(a) + ", " + std::to_string(b) + ")");
}

}  // namespace selmer::local
