#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace selmer::arith {

using i64 = std::int64_t;
using u64 = std::uint64_t;
__extension__ using i128 = __int128;
__extension__ using u128 = unsigned __int128;

inline u64 mulmod(u64 a, u64 b, u64 m) noexcept { return static_cast<u64>(static_cast<u128>(a) * b % m); }
u64 powmod(u64 a, u64 e, u64 m) noexcept;

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
bool is_prime(u64 n) noexcept;

/// Non-negative residue of a mod m (m > 0).
inline u64 mod(i64 a, u64 m) noexcept {
    const i128 r = static_cast<i128>(a) % static_cast<i128>(m);
    return static_cast<u64>(r < 0 ? r + static_cast<i128>(m) : r);
}

/// Jacobi symbol (a/n) for odd n > 0, in {-1, 0, 1}.
int jacobi(i64 a, u64 n) noexcept;

/// 0 if a is a nonzero square mod p, 1 if a non-square; nullopt when p | a.
std::optional<unsigned> legendre_additive(i64 a, u64 p);

/// A square root of a modulo odd prime p; requires a to be a square mod p.
u64 sqrt_mod(i64 a, u64 p);

/// (p-1)/2 mod 2 and (p^2-1)/8 mod 2 for odd p.
inline unsigned eps(u64 p) noexcept { return static_cast<unsigned>((p >> 1) & 1U); }
inline unsigned omega(u64 p) noexcept {
    const u64 r = p & 7U;
    return (r == 3 || r == 5) ? 1U : 0U;
}

/// Exponent of p in n (n != 0).
unsigned valuation(i64 n, u64 p) noexcept;

/// A place of Q: the real place or a prime. Ordered infinity < 2 < 3 < 5 < ...
class Place {
public:
    enum class Kind { Infinity, Two, Odd };

    constexpr Place() noexcept = default;
    static constexpr Place infinity() noexcept { return Place{}; }
    static Place prime(u64 p);

    [[nodiscard]] constexpr u64 p() const noexcept { return p_; }
    [[nodiscard]] constexpr Kind kind() const noexcept {
        return p_ == 0 ? Kind::Infinity : (p_ == 2 ? Kind::Two : Kind::Odd);
    }
    [[nodiscard]] constexpr bool is_infinite() const noexcept { return p_ == 0; }
    /// Dimension of Q_v^x / (Q_v^x)^2 over F2.
    [[nodiscard]] constexpr unsigned ambient_dim() const noexcept {
        return p_ == 0 ? 1U : (p_ == 2 ? 3U : 2U);
    }
    [[nodiscard]] std::string to_string() const;

    friend constexpr auto operator<=>(const Place&, const Place&) = default;

private:
    explicit constexpr Place(u64 p) noexcept : p_(p) {}
    u64 p_ = 0;  // 0 encodes the real place
};

/// Element of Q_v^x / (Q_v^x)^2 in fixed F2 coordinates packed into `bits`:
///   infinity: bit0 = sign
///   odd p:    bit0 = valuation parity, bit1 = additive Legendre symbol of the unit part
///   2:        bit0 = valuation parity, bit1 = eps(unit), bit2 = omega(unit)
/// Addition of coordinates is multiplication of classes.
struct SquareClass {
    Place place;
    unsigned bits = 0;

    [[nodiscard]] bool is_identity() const noexcept { return bits == 0; }
    [[nodiscard]] unsigned val_parity() const noexcept { return bits & 1U; }
    [[nodiscard]] unsigned sign_bit() const noexcept { return bits & 1U; }
    [[nodiscard]] unsigned unit_class() const noexcept { return (bits >> 1) & 1U; }
    /// Unit part mod 8 at the place 2.
    [[nodiscard]] unsigned unit_mod8() const noexcept;
    [[nodiscard]] std::string to_string() const;

    SquareClass operator+(const SquareClass& o) const;
    friend bool operator==(const SquareClass&, const SquareClass&) = default;
    friend auto operator<=>(const SquareClass&, const SquareClass&) = default;

    static SquareClass from_bits(Place v, unsigned bits) { return SquareClass{v, bits & ((1U << v.ambient_dim()) - 1U)}; }
    /// The class with valuation parity `val` and unit part u (u odd, u mod 8 at 2).
    static SquareClass from_parts(Place v, unsigned val, i64 unit);
};

/// Image of x != 0 in Q_v^x / (Q_v^x)^2.
SquareClass square_class(i64 x, Place v);
/// Image of num/den.
SquareClass square_class(i64 num, i64 den, Place v);

/// Additive Hilbert symbol of two classes at the same place.
unsigned hilbert_additive(const SquareClass& a, const SquareClass& b);
unsigned hilbert_additive(i64 a, i64 b, Place v);

/// Representative integer of a class: +-1 at infinity; p^val * u with u in [1, 4p) at odd p; 2^val * u, u in {1,3,5,7} at 2.
i64 representative(const SquareClass& c);

/// All 2^ambient_dim classes at v, ordered by their bit pattern.
std::vector<SquareClass> all_classes(Place v);

struct NotSquarefree : std::invalid_argument {
    explicit NotSquarefree(i64 d) : std::invalid_argument("not squarefree: " + std::to_string(d)), value(d) {}
    i64 value;
};

struct Factorization {
    int sign = 1;
    std::vector<u64> primes;  // ascending, distinct
    friend bool operator==(const Factorization&, const Factorization&) = default;
};

/// Trial division. Rejects d = 0 (std::invalid_argument) and non-squarefree d (NotSquarefree).
Factorization factor_squarefree(i64 d);

/// (prime, exponent) pairs of |n| ascending; n != 0.
std::vector<std::pair<u64, unsigned>> factor(u64 n);

/// Distinct primes of |n| ascending.
std::vector<u64> prime_divisors(u64 n);

/// Squarefree part of n keeping the sign (e.g. -12 -> -3).
i64 squarefree_kernel(i64 n);

/// Product of the distinct odd primes of |n|.
u64 odd_radical(u64 n);

inline bool is_square(i64 n) {
    if (n < 0) return false;
    auto r = static_cast<i64>(__builtin_sqrtl(static_cast<long double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r * r == n;
}

/// Squarefree d with 0 < |d| <= X and no prime factor in `forbidden`, in order
/// of increasing |d|, emitting +|d| before -|d|. Sieves in blocks.
class SquarefreeStream {
public:
    SquarefreeStream(u64 X, std::vector<u64> forbidden);
    std::optional<i64> next();
    /// Drains a fresh stream; with both_signs false only positive d are kept.
    static std::vector<i64> collect(u64 X, std::span<const u64> forbidden, bool both_signs = true);

private:
    void refill();

    u64 X_;
    std::vector<u64> forbidden_;
    std::vector<u64> small_primes_;
    u64 block_start_ = 1;
    std::vector<u64> block_;
    std::size_t idx_ = 0;
    bool pending_negative_ = false;
};

/// Element of Q^x / (Q^x)^2: sign and a set of primes (2 included).
class GlobalClass {
public:
    GlobalClass() = default;
    GlobalClass(int sign, std::vector<u64> primes);
    static GlobalClass from_integer(i64 n);

    [[nodiscard]] int sign() const noexcept { return negative_ ? -1 : 1; }
    [[nodiscard]] const std::vector<u64>& primes() const noexcept { return primes_; }
    [[nodiscard]] bool two_exponent() const noexcept { return !primes_.empty() && primes_.front() == 2; }
    [[nodiscard]] bool is_identity() const noexcept { return !negative_ && primes_.empty(); }
    [[nodiscard]] SquareClass at(Place v) const;
    /// The squarefree integer; throws std::overflow_error if it does not fit.
    [[nodiscard]] i64 to_integer() const;
    [[nodiscard]] std::string to_string() const;

    GlobalClass operator*(const GlobalClass& o) const;
    GlobalClass& operator*=(const GlobalClass& o) { return *this = *this * o; }
    friend bool operator==(const GlobalClass&, const GlobalClass&) = default;
    friend auto operator<=>(const GlobalClass&, const GlobalClass&) = default;

private:
    bool negative_ = false;
    std::vector<u64> primes_;
};

}  // namespace selmer::arith
