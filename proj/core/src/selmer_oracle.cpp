#include "selmer/selmer_oracle.hpp"

#include <algorithm>
#include <bit>

namespace selmer {

using arith::GlobalClass;
using arith::i64;
using arith::Place;
using arith::u64;

std::vector<Place> places_of_twist(const CurveContext& ctx, i64 d) {
    std::vector<u64> primes = ctx.bad_primes();
    for (u64 p : arith::factor_squarefree(d).primes) primes.push_back(p);
    std::sort(primes.begin(), primes.end());
    primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
    std::vector<Place> out{Place::infinity()};
    for (u64 p : primes) out.push_back(Place::prime(p));
    return out;
}

SelmerGroup selmer_group(const CurveContext& ctx, i64 d, Isogeny which, std::span<const u64> extra_primes) {
    std::vector<Place> places = places_of_twist(ctx, d);
    if (places.size() + extra_primes.size() > kMaxPlaces)
        throw EnumerationTooLarge("selmer_group: " + std::to_string(places.size() + extra_primes.size()) +
                                  " places exceeds the guard");

    std::vector<LocalSubgroup> conditions;
    for (const Place& v : places) conditions.push_back(ctx.local_image(d, v, which));
    for (u64 q : extra_primes) {
        if (ctx.is_bad_prime(q) || d % static_cast<i64>(q) == 0)
            throw std::invalid_argument("selmer_group: extra prime must be good and prime to d");
        places.push_back(Place::prime(q));
        conditions.push_back(LocalSubgroup::units(places.back()));
    }

    // generators: -1, then the finite places in order
    std::vector<GlobalClass> gens{GlobalClass(-1, {})};
    for (std::size_t i = 1; i < places.size(); ++i) gens.emplace_back(1, std::vector<u64>{places[i].p()});
    std::sort(gens.begin() + 1, gens.end(), [](const GlobalClass& a, const GlobalClass& b) {
        return a.primes().front() < b.primes().front();
    });
    const std::size_t n = gens.size();
    if (n > 40) throw EnumerationTooLarge("selmer_group: too many generators");

    // class of each generator at each place
    std::vector<std::vector<unsigned>> gen_bits(n, std::vector<unsigned>(places.size()));
    for (std::size_t g = 0; g < n; ++g)
        for (std::size_t k = 0; k < places.size(); ++k) gen_bits[g][k] = gens[g].at(places[k]).bits;

    auto passes = [&](const std::vector<unsigned>& cur) {
        for (std::size_t k = 0; k < places.size(); ++k)
            if (!conditions[k].contains_bits(cur[k])) return false;
        return true;
    };

    // Gray-code walk over all 2^n products
    std::vector<u64> basis_masks;  // reduced echelon over generator coordinates
    auto insert = [&](u64 m) {
        for (u64 b : basis_masks)
            if (m & (u64{1} << (63 - std::countl_zero(b)))) m ^= b;
        if (!m) return;
        for (u64& b : basis_masks)
            if (b & (u64{1} << (63 - std::countl_zero(m)))) b ^= m;
        basis_masks.push_back(m);
    };
    std::vector<unsigned> cur(places.size(), 0);
    u64 count = 1;  // identity
    u64 gray = 0;
    for (u64 i = 1; i < (u64{1} << n); ++i) {
        const unsigned flip = static_cast<unsigned>(std::countr_zero(i));
        gray ^= u64{1} << flip;
        for (std::size_t k = 0; k < places.size(); ++k) cur[k] ^= gen_bits[flip][k];
        if (passes(cur)) {
            ++count;
            insert(gray);
        }
    }
    if (count != (u64{1} << basis_masks.size())) throw std::logic_error("selmer_group: accepted set is not a group");

    std::sort(basis_masks.begin(), basis_masks.end());
    SelmerGroup out;
    out.dim = static_cast<unsigned>(basis_masks.size());
    for (u64 m : basis_masks) {
        GlobalClass c;
        for (std::size_t g = 0; g < n; ++g)
            if ((m >> g) & 1U) c *= gens[g];
        out.basis.push_back(std::move(c));
    }
    return out;
}

SelmerResult brute_force_selmer(const CurveContext& ctx, i64 d) {
    SelmerResult r;
    r.d = d;
    r.phi = selmer_group(ctx, d, Isogeny::Phi);
    r.phihat = selmer_group(ctx, d, Isogeny::PhiHat);
    return r;
}

unsigned global_pairing(const CurveContext& ctx, i64 d, const GlobalClass& s, const GlobalClass& t) {
    unsigned sum = 0;
    for (const Place& v : places_of_twist(ctx, d)) sum ^= arith::hilbert_additive(s.at(v), t.at(v));
    return sum;
}

}  // namespace selmer
