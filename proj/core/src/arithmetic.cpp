#include "selmer/arithmetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace selmer::arith {

u64 powmod(u64 a, u64 e, u64 m) noexcept {
    u64 r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1U) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

bool is_prime(u64 n) noexcept {
    if (n < 2) return false;
    for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    unsigned s = 0;
    while ((d & 1U) == 0) {
        d >>= 1;
        ++s;
    }
    for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (unsigned i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

int jacobi(i64 a_in, u64 n) noexcept {
    u64 a = mod(a_in, n);
    int t = 1;
    while (a != 0) {
        while ((a & 1U) == 0) {
            a >>= 1;
            const u64 r = n & 7U;
            if (r == 3 || r == 5) t = -t;
        }
        std::swap(a, n);
        if ((a & 3U) == 3 && (n & 3U) == 3) t = -t;
        a %= n;
    }
    return n == 1 ? t : 0;
}

std::optional<unsigned> legendre_additive(i64 a, u64 p) {
    if (p < 3 || (p & 1U) == 0) throw std::invalid_argument("legendre_additive: p must be an odd prime");
    const int j = jacobi(a, p);
    if (j == 0) return std::nullopt;
    return j == 1 ? 0U : 1U;
}

u64 sqrt_mod(i64 a_in, u64 p) {
    const u64 a = mod(a_in, p);
    if (a == 0) return 0;
    if (jacobi(static_cast<i64>(a), p) != 1) throw std::domain_error("sqrt_mod: not a square");
    if ((p & 3U) == 3) return powmod(a, (p + 1) / 4, p);
    // Tonelli-Shanks
    u64 q = p - 1;
    unsigned s = 0;
    while ((q & 1U) == 0) {
        q >>= 1;
        ++s;
    }
    u64 z = 2;
    while (jacobi(static_cast<i64>(z), p) != -1) ++z;
    u64 m = s, c = powmod(z, q, p), t = powmod(a, q, p), r = powmod(a, (q + 1) / 2, p);
    while (t != 1) {
        u64 i = 0, tt = t;
        while (tt != 1) {
            tt = mulmod(tt, tt, p);
            ++i;
        }
        u64 b = c;
        for (u64 k = 0; k + i + 1 < m; ++k) b = mulmod(b, b, p);
        m = i;
        c = mulmod(b, b, p);
        t = mulmod(t, c, p);
        r = mulmod(r, b, p);
    }
    return r;
}

unsigned valuation(i64 n, u64 p) noexcept {
    if (n == 0) return 0;
    u64 m = n < 0 ? static_cast<u64>(-(n + 1)) + 1 : static_cast<u64>(n);
    unsigned v = 0;
    while (m % p == 0) {
        m /= p;
        ++v;
    }
    return v;
}

Place Place::prime(u64 p) {
    if (!is_prime(p)) throw std::invalid_argument("Place::prime: " + std::to_string(p) + " is not prime");
    return Place(p);
}

std::string Place::to_string() const { return p_ == 0 ? std::string("inf") : std::to_string(p_); }

unsigned SquareClass::unit_mod8() const noexcept {
    switch ((bits >> 1) & 3U) {
        case 0: return 1;  // eps 0, omega 0
        case 1: return 7;  // eps 1, omega 0
        case 2: return 5;  // eps 0, omega 1
        default: return 3;
    }
}

std::string SquareClass::to_string() const { return std::to_string(representative(*this)) + "@" + place.to_string(); }

SquareClass SquareClass::operator+(const SquareClass& o) const {
    if (!(place == o.place)) throw std::invalid_argument("SquareClass: places differ");
    return SquareClass{place, bits ^ o.bits};
}

SquareClass SquareClass::from_parts(Place v, unsigned val, i64 unit) {
    switch (v.kind()) {
        case Place::Kind::Infinity: return SquareClass{v, unit < 0 ? 1U : 0U};
        case Place::Kind::Two: {
            const u64 u = mod(unit, 8);
            const unsigned e = static_cast<unsigned>((u >> 1) & 1U);
            const unsigned w = omega(u);
            return SquareClass{v, (val & 1U) | (e << 1) | (w << 2)};
        }
        case Place::Kind::Odd: {
            auto l = legendre_additive(unit, v.p());
            if (!l) throw std::invalid_argument("SquareClass::from_parts: unit divisible by p");
            return SquareClass{v, (val & 1U) | (*l << 1)};
        }
    }
    return SquareClass{v, 0};
}

SquareClass square_class(i64 x, Place v) {
    if (x == 0) throw std::invalid_argument("square_class: zero");
    if (v.is_infinite()) return SquareClass{v, x < 0 ? 1U : 0U};
    const u64 p = v.p();
    i128 u = x;
    unsigned val = 0;
    while (u % static_cast<i128>(p) == 0) {
        u /= static_cast<i128>(p);
        ++val;
    }
    const i64 unit_mod = static_cast<i64>(u % static_cast<i128>(v.kind() == Place::Kind::Two ? 8 : p));
    return SquareClass::from_parts(v, val, unit_mod);
}

SquareClass square_class(i64 num, i64 den, Place v) {
    if (den == 0) throw std::invalid_argument("square_class: zero denominator");
    return square_class(num, v) + square_class(den, v);
}

unsigned hilbert_additive(const SquareClass& a, const SquareClass& b) {
    if (!(a.place == b.place)) throw std::invalid_argument("hilbert_additive: places differ");
    switch (a.place.kind()) {
        case Place::Kind::Infinity: return a.bits & b.bits & 1U;
        case Place::Kind::Odd: {
            const unsigned al = a.bits & 1U, be = b.bits & 1U;
            return ((al & be & eps(a.place.p())) ^ (al & b.unit_class()) ^ (be & a.unit_class())) & 1U;
        }
        case Place::Kind::Two: {
            const unsigned al = a.bits & 1U, be = b.bits & 1U;
            const unsigned ea = (a.bits >> 1) & 1U, eb = (b.bits >> 1) & 1U;
            const unsigned wa = (a.bits >> 2) & 1U, wb = (b.bits >> 2) & 1U;
            return ((ea & eb) ^ (al & wb) ^ (be & wa)) & 1U;
        }
    }
    return 0;
}

unsigned hilbert_additive(i64 a, i64 b, Place v) { return hilbert_additive(square_class(a, v), square_class(b, v)); }

i64 representative(const SquareClass& c) {
    switch (c.place.kind()) {
        case Place::Kind::Infinity: return c.sign_bit() ? -1 : 1;
        case Place::Kind::Two: return (c.val_parity() ? 2 : 1) * static_cast<i64>(c.unit_mod8());
        case Place::Kind::Odd: {
            const u64 p = c.place.p();
            i64 u = 1;
            if (c.unit_class()) {
                u = 2;
                while (jacobi(u, p) != -1) ++u;
            }
            return (c.val_parity() ? static_cast<i64>(p) : 1) * u;
        }
    }
    return 1;
}

std::vector<SquareClass> all_classes(Place v) {
    std::vector<SquareClass> out;
    for (unsigned b = 0; b < (1U << v.ambient_dim()); ++b) out.push_back(SquareClass{v, b});
    return out;
}

std::vector<std::pair<u64, unsigned>> factor(u64 n) {
    if (n == 0) throw std::invalid_argument("factor: zero");
    std::vector<std::pair<u64, unsigned>> out;
    auto take = [&](u64 p) {
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        if (e) out.emplace_back(p, e);
    };
    take(2);
    take(3);
    for (u64 p = 5; p <= n / p; p += 6) {
        take(p);
        take(p + 2);
    }
    if (n > 1) {
        if (!out.empty() && out.back().first == n) ++out.back().second;
        else out.emplace_back(n, 1);
    }
    return out;
}

std::vector<u64> prime_divisors(u64 n) {
    std::vector<u64> out;
    for (auto [p, e] : factor(n)) out.push_back(p);
    return out;
}

namespace {
u64 magnitude(i64 d) noexcept { return d < 0 ? static_cast<u64>(-(d + 1)) + 1 : static_cast<u64>(d); }
}  // namespace

Factorization factor_squarefree(i64 d) {
    if (d == 0) throw std::invalid_argument("factor_squarefree: zero");
    Factorization f;
    f.sign = d < 0 ? -1 : 1;
    for (auto [p, e] : factor(magnitude(d))) {
        if (e > 1) throw NotSquarefree(d);
        f.primes.push_back(p);
    }
    return f;
}

i64 squarefree_kernel(i64 n) {
    if (n == 0) throw std::invalid_argument("squarefree_kernel: zero");
    i64 k = n < 0 ? -1 : 1;
    for (auto [p, e] : factor(magnitude(n)))
        if (e & 1U) k *= static_cast<i64>(p);
    return k;
}

u64 odd_radical(u64 n) {
    u64 r = 1;
    for (auto [p, e] : factor(n))
        if (p != 2) r *= p;
    return r;
}

SquarefreeStream::SquarefreeStream(u64 X, std::vector<u64> forbidden) : X_(X), forbidden_(std::move(forbidden)) {
    std::sort(forbidden_.begin(), forbidden_.end());
    forbidden_.erase(std::unique(forbidden_.begin(), forbidden_.end()), forbidden_.end());
    u64 root = static_cast<u64>(std::sqrt(static_cast<long double>(X)));
    while (root * root > X) --root;
    while ((root + 1) * (root + 1) <= X) ++root;
    std::vector<bool> composite(root + 1, false);
    for (u64 i = 2; i <= root; ++i) {
        if (composite[i]) continue;
        small_primes_.push_back(i);
        for (u64 j = i * i; j <= root; j += i) composite[j] = true;
    }
}

void SquarefreeStream::refill() {
    constexpr u64 kBlock = 1U << 16;
    block_.clear();
    idx_ = 0;
    while (block_.empty() && block_start_ <= X_) {
        const u64 lo = block_start_;
        const u64 hi = std::min(X_, lo + kBlock - 1);
        std::vector<bool> bad(hi - lo + 1, false);
        auto strike = [&](u64 step) {
            u64 first = (lo + step - 1) / step * step;
            for (u64 m = first; m <= hi; m += step) bad[m - lo] = true;
        };
        for (u64 q : small_primes_) strike(q * q);
        for (u64 q : forbidden_) strike(q);
        for (u64 n = lo; n <= hi; ++n)
            if (!bad[n - lo]) block_.push_back(n);
        block_start_ = hi + 1;
    }
}

std::optional<i64> SquarefreeStream::next() {
    if (pending_negative_) {
        pending_negative_ = false;
        return -static_cast<i64>(block_[idx_++]);
    }
    if (idx_ >= block_.size()) refill();
    if (idx_ >= block_.size()) return std::nullopt;
    pending_negative_ = true;
    return static_cast<i64>(block_[idx_]);
}

std::vector<i64> SquarefreeStream::collect(u64 X, std::span<const u64> forbidden, bool both_signs) {
    SquarefreeStream s(X, std::vector<u64>(forbidden.begin(), forbidden.end()));
    std::vector<i64> out;
    while (auto d = s.next())
        if (both_signs || *d > 0) out.push_back(*d);
    return out;
}

GlobalClass::GlobalClass(int sign, std::vector<u64> primes) : negative_(sign < 0), primes_(std::move(primes)) {
    std::sort(primes_.begin(), primes_.end());
    // repeated primes cancel in pairs
    std::vector<u64> reduced;
    for (std::size_t i = 0; i < primes_.size();) {
        std::size_t j = i;
        while (j < primes_.size() && primes_[j] == primes_[i]) ++j;
        if ((j - i) & 1U) reduced.push_back(primes_[i]);
        i = j;
    }
    primes_ = std::move(reduced);
}

GlobalClass GlobalClass::from_integer(i64 n) {
    if (n == 0) throw std::invalid_argument("GlobalClass: zero");
    std::vector<u64> ps;
    for (auto [p, e] : factor(magnitude(n)))
        if (e & 1U) ps.push_back(p);
    return GlobalClass(n < 0 ? -1 : 1, std::move(ps));
}

SquareClass GlobalClass::at(Place v) const {
    if (v.is_infinite()) return SquareClass{v, negative_ ? 1U : 0U};
    const u64 p = v.p();
    const u64 m = v.kind() == Place::Kind::Two ? 8 : p;
    unsigned val = 0;
    u64 unit = negative_ ? m - 1 : 1;
    for (u64 q : primes_) {
        if (q == p) val = 1;
        else unit = mulmod(unit, q % m, m);
    }
    return SquareClass::from_parts(v, val, static_cast<i64>(unit));
}

i64 GlobalClass::to_integer() const {
    i128 acc = negative_ ? -1 : 1;
    for (u64 q : primes_) {
        acc *= static_cast<i128>(q);
        if (acc > std::numeric_limits<i64>::max() || acc < std::numeric_limits<i64>::min())
            throw std::overflow_error("GlobalClass::to_integer: overflow");
    }
    return static_cast<i64>(acc);
}

std::string GlobalClass::to_string() const {
    std::string s = negative_ ? "-1" : "1";
    for (u64 q : primes_) s += "*" + std::to_string(q);
    return s;
}

GlobalClass GlobalClass::operator*(const GlobalClass& o) const {
    GlobalClass out;
    out.negative_ = negative_ != o.negative_;
    std::set_symmetric_difference(primes_.begin(), primes_.end(), o.primes_.begin(), o.primes_.end(),
                                  std::back_inserter(out.primes_));
    return out;
}

}  // namespace selmer::arith
