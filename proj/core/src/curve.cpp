#include "selmer/curve.hpp"

#include <algorithm>
#include <cstdlib>

#include "selmer/torsor.hpp"

namespace selmer {

using arith::i64;
using arith::Place;
using arith::SquareClass;
using arith::u64;

std::string to_string(PrimeType t) { return "type" + std::to_string(type_index(t)); }

namespace {

constexpr i64 kCoeffLimit = i64{1} << 24;

// Additive Legendre symbol (n / p) for squarefree n, evaluated from p mod D by reciprocity.
unsigned symbol_from_residue(i64 n, u64 r) {
    unsigned s = n < 0 ? arith::eps(r) : 0U;
    for (u64 q : arith::prime_divisors(static_cast<u64>(std::llabs(n)))) {
        if (q == 2) s ^= arith::omega(r);
        else s ^= static_cast<unsigned>(arith::jacobi(static_cast<i64>(r % q), q) == -1) ^ (arith::eps(r) & arith::eps(q));
    }
    return s & 1U;
}

}  // namespace

CurveContext::CurveContext(i64 A, i64 B) : A_(A), B_(B), cache_(std::make_shared<Cache>()) {
    using R = CurveRejected::Reason;
    if (std::llabs(A) > kCoeffLimit || std::llabs(B) > kCoeffLimit)
        throw CurveRejected(R::TooLarge, "coefficients must satisfy |A|, |B| <= 2^24");
    if (B == 0 || A * A - 4 * B == 0)
        throw CurveRejected(R::Singular, "singular curve: B = 0 or A^2 - 4B = 0");
    delta_ = arith::squarefree_kernel(A * A - 4 * B);
    delta_prime_ = arith::squarefree_kernel(B);
    if (delta_ == 1) throw CurveRejected(R::FullTwoTorsion, "A^2 - 4B is a square: full rational 2-torsion");
    if (delta_prime_ == 1) throw CurveRejected(R::CyclicFourIsogeny, "B is a square: cyclic 4-isogeny");
    if (arith::squarefree_kernel(delta_ * delta_prime_) == 1)
        throw CurveRejected(R::CyclicFourIsogeny, "B(A^2 - 4B) is a square: cyclic 4-isogeny");

    bad_primes_.push_back(2);
    for (u64 q : arith::prime_divisors(static_cast<u64>(std::llabs(B)))) bad_primes_.push_back(q);
    for (u64 q : arith::prime_divisors(static_cast<u64>(std::llabs(A * A - 4 * B)))) bad_primes_.push_back(q);
    std::sort(bad_primes_.begin(), bad_primes_.end());
    bad_primes_.erase(std::unique(bad_primes_.begin(), bad_primes_.end()), bad_primes_.end());

    bad_places_.push_back(Place::infinity());
    for (u64 q : bad_primes_) {
        bad_places_.push_back(Place::prime(q));
        if (q != 2) D_ *= q;
    }
}

bool CurveContext::is_bad_prime(u64 p) const noexcept {
    return std::binary_search(bad_primes_.begin(), bad_primes_.end(), p);
}

std::string CurveContext::to_string() const {
    return "y^2 = x^3 + " + std::to_string(A_) + " x^2 + " + std::to_string(B_) + " x";
}

PrimeType CurveContext::classify_residue(u64 r) const {
    const unsigned a = symbol_from_residue(delta_, r);
    const unsigned b = symbol_from_residue(delta_prime_, r);
    if (!a && !b) return PrimeType::Type1;
    if (!a) return PrimeType::Type2;
    if (!b) return PrimeType::Type3;
    return PrimeType::Type4;
}

PrimeType CurveContext::classify_prime(u64 p) const {
    if (p == 2 || is_bad_prime(p) || !arith::is_prime(p))
        throw std::invalid_argument("classify_prime: " + std::to_string(p) + " is not a good odd prime");
    const unsigned a = *arith::legendre_additive(delta_, p);
    const unsigned b = *arith::legendre_additive(delta_prime_, p);
    if (!a && !b) return PrimeType::Type1;
    if (!a) return PrimeType::Type2;
    if (!b) return PrimeType::Type3;
    return PrimeType::Type4;
}

unsigned CurveContext::lambda(u64 p) const {
    if (*arith::legendre_additive(B_, p) != 0) throw std::invalid_argument("lambda: B is not a square mod p");
    const u64 root = arith::sqrt_mod(B_, p);
    const i64 x = static_cast<i64>(arith::mod(A_, p) + 2 * root) % static_cast<i64>(p);
    return *arith::legendre_additive(x, p);
}

LocalSubgroup CurveContext::twisted_image(i64 d, u64 p, Isogeny which) const {
    const PrimeType t = classify_prime(p);
    if (d % static_cast<i64>(p) != 0) throw std::invalid_argument("twisted_image: p does not divide d");
    const Place v = Place::prime(p);
    LocalSubgroup img;
    switch (t) {
        case PrimeType::Type1: {
            const unsigned chi = *arith::legendre_additive(d / static_cast<i64>(p), p) ^ lambda(p);
            img = LocalSubgroup::span(v, {SquareClass{v, 1U | (chi << 1)}});
            break;
        }
        case PrimeType::Type2: img = LocalSubgroup::trivial(v); break;
        case PrimeType::Type3: img = LocalSubgroup::full(v); break;
        case PrimeType::Type4: img = LocalSubgroup::units(v); break;
    }
    return which == Isogeny::Phi ? img : img.annihilator();
}

LocalSubgroup CurveContext::searched_image(i64 d, Place v, Isogeny which) const {
    const i64 rep = arith::representative(arith::square_class(d, v));
    auto pair = local::kummer_pair(A_ * rep, B_ * rep * rep, v);
    return which == Isogeny::Phi ? pair.image : pair.dual;
}

LocalSubgroup CurveContext::bad_place_image(const SquareClass& d_class, Isogeny which) const {
    const Place v = d_class.place;
    const auto key = std::make_tuple(v.p(), d_class.bits, static_cast<int>(which));
    {
        std::lock_guard lk(cache_->mu);
        auto it = cache_->images.find(key);
        if (it != cache_->images.end()) return it->second;
    }
    const i64 rep = arith::representative(d_class);
    auto pair = local::kummer_pair(A_ * rep, B_ * rep * rep, v);
    std::lock_guard lk(cache_->mu);
    cache_->images.emplace(std::make_tuple(v.p(), d_class.bits, static_cast<int>(Isogeny::Phi)), pair.image);
    cache_->images.emplace(std::make_tuple(v.p(), d_class.bits, static_cast<int>(Isogeny::PhiHat)), pair.dual);
    return which == Isogeny::Phi ? pair.image : pair.dual;
}

LocalSubgroup CurveContext::local_image(i64 d, Place v, Isogeny which) const {
    if (d == 0) throw std::invalid_argument("local_image: d = 0");
    if (v.is_infinite() || is_bad_prime(v.p())) return bad_place_image(arith::square_class(d, v), which);
    if (d % static_cast<i64>(v.p()) == 0) return twisted_image(d, v.p(), which);
    throw std::invalid_argument("local_image: place " + v.to_string() + " is not in T_d");
}

int CurveContext::c_from_classes(const std::vector<SquareClass>& d_classes) const {
    if (d_classes.size() != bad_places_.size()) throw std::invalid_argument("c_from_classes: wrong number of classes");
    int c = 0;
    for (const auto& cls : d_classes) c += static_cast<int>(bad_place_image(cls).dim()) - 1;
    return c;
}

int CurveContext::c_d(i64 d) const {
    int c = 0;
    for (const Place& v : bad_places_) c += static_cast<int>(local_image(d, v).dim()) - 1;
    return c;
}

int CurveContext::tamagawa_ord2(i64 d) const {
    int u = c_d(d);
    for (u64 p : arith::factor_squarefree(d).primes)
        if (!is_bad_prime(p)) u += static_cast<int>(twisted_image(d, p).dim()) - 1;
    return u;
}

std::size_t CurveContext::cache_size() const {
    std::lock_guard lk(cache_->mu);
    return cache_->images.size();
}

}  // namespace selmer
