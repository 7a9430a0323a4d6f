#include "doctest.h"

#include <map>
#include <stdexcept>

#include "selmer/curve.hpp"
#include "selmer/local_subgroup.hpp"
#include "selmer/random.hpp"
#include "selmer/selmer_oracle.hpp"
#include "selmer/torsor.hpp"

using namespace selmer;
using arith::Place;
using arith::i64;
using arith::u64;

namespace {

std::map<u64, unsigned> image_sizes(const CurveContext& c, i64 d, Isogeny which) {
    std::map<u64, unsigned> out;
    for (const auto& v : c.bad_places()) out[v.p()] = 1U << c.local_image(d, v, which).dim();
    return out;
}

}  // namespace

TEST_CASE("curve construction") {
    const CurveContext e(1, -1);
    CHECK(e.delta() == 5);
    CHECK(e.delta_prime() == -1);
    CHECK(e.bad_primes() == std::vector<u64>{2, 5});
    CHECK(e.bad_places() == std::vector<Place>{Place::infinity(), Place::prime(2), Place::prime(5)});
    CHECK(e.D() == 40);

    const CurveContext f(1, 3);
    CHECK(f.delta() == -11);
    CHECK(f.delta_prime() == 3);
    CHECK(f.bad_primes() == std::vector<u64>{2, 3, 11});
    CHECK(f.D() == 264);

    auto reason = [](i64 A, i64 B) {
        try {
            CurveContext c(A, B);
        } catch (const CurveRejected& e) {
            return static_cast<int>(e.reason());
        }
        return -1;
    };
    CHECK(reason(0, 4) == static_cast<int>(CurveRejected::Reason::CyclicFourIsogeny));
    CHECK(reason(2, 1) == static_cast<int>(CurveRejected::Reason::Singular));
    CHECK(reason(1, 0) == static_cast<int>(CurveRejected::Reason::Singular));
    CHECK(reason(3, 2) == static_cast<int>(CurveRejected::Reason::FullTwoTorsion));  // 9 - 8 = 1
    CHECK(reason(4, 2) == static_cast<int>(CurveRejected::Reason::CyclicFourIsogeny));  // delta ~ delta' ~ 2
    CHECK(reason(1, 1LL << 30) == static_cast<int>(CurveRejected::Reason::TooLarge));
}

TEST_CASE("prime types") {
    const CurveContext e(1, -1);
    CHECK(e.classify_prime(29) == PrimeType::Type1);
    CHECK(e.classify_prime(11) == PrimeType::Type2);
    CHECK_THROWS_AS((void)e.classify_prime(5), std::invalid_argument);
    CHECK_THROWS_AS((void)e.classify_prime(2), std::invalid_argument);
    // type depends on (delta/p, delta'/p); compare with the residue form
    for (u64 p = 3; p < 3000; p += 2) {
        if (!arith::is_prime(p) || e.is_bad_prime(p)) continue;
        CHECK(e.classify_prime(p) == e.classify_residue(p % e.D()));
    }
    const CurveContext f(1, 3);
    for (u64 p = 5; p < 3000; p += 2) {
        if (!arith::is_prime(p) || f.is_bad_prime(p)) continue;
        CHECK(f.classify_prime(p) == f.classify_residue(p % f.D()));
    }
}

TEST_CASE("local subgroups") {
    for (const Place v : {Place::infinity(), Place::prime(2), Place::prime(7)}) {
        CHECK(LocalSubgroup::trivial(v).dim() == 0);
        CHECK(LocalSubgroup::full(v).dim() == v.ambient_dim());
        CHECK(LocalSubgroup::trivial(v).annihilator() == LocalSubgroup::full(v));
        if (v.kind() == Place::Kind::Odd) CHECK(LocalSubgroup::units(v).annihilator() == LocalSubgroup::units(v));
        for (unsigned mask = 1; mask < (1U << (1U << v.ambient_dim())); mask += 2) {
            LocalSubgroup s;
            try {
                s = LocalSubgroup::from_mask(v, mask);
            } catch (const std::invalid_argument&) {
                continue;
            }
            CHECK(s.annihilator().annihilator() == s);
            CHECK(s.dim() + s.annihilator().dim() == v.ambient_dim());
            CHECK(s.orthogonal_to(s.annihilator()));
            CHECK(LocalSubgroup::span(v, s.basis()) == s);
            // only the last basis element may have odd valuation
            for (std::size_t i = 0; i + 1 < s.basis().size(); ++i) CHECK(s.basis()[i].val_parity() == 0U);
        }
    }
    CHECK_THROWS_AS(LocalSubgroup::from_mask(Place::prime(3), 0b0110), std::invalid_argument);
}

TEST_CASE("local images of the untwisted fixtures") {
    const CurveContext e(1, -1);
    CHECK(image_sizes(e, 1, Isogeny::Phi) == std::map<u64, unsigned>{{0, 1}, {2, 2}, {5, 4}});
    CHECK(image_sizes(e, 1, Isogeny::PhiHat) == std::map<u64, unsigned>{{0, 2}, {2, 4}, {5, 1}});
    CHECK(e.c_d(1) == 0);

    const CurveContext f(1, 3);
    CHECK(image_sizes(f, 1, Isogeny::Phi) == std::map<u64, unsigned>{{0, 2}, {2, 2}, {3, 1}, {11, 4}});
    CHECK(image_sizes(f, 1, Isogeny::PhiHat) == std::map<u64, unsigned>{{0, 1}, {2, 4}, {3, 4}, {11, 1}});
    CHECK(f.c_d(1) == 0);
}

TEST_CASE("twisted primes") {
    const CurveContext e(1, -1);
    const Place v29 = Place::prime(29);
    // 12^2 = -1 mod 29 and 1 + 2*12 = 25 is a square, so the image is spanned by d itself
    const auto w = e.local_image(29, v29);
    CHECK(w.dim() == 1);
    CHECK(w.contains(arith::square_class(29, v29)));
    CHECK(w.contains(arith::square_class(29 * 25, v29)));
    CHECK(e.lambda(29) == 0U);

    const Place v11 = Place::prime(11);
    CHECK(e.local_image(11 * 3, v11).dim() == 0);
    CHECK(e.local_image_dual(11 * 3, v11) == LocalSubgroup::full(v11));

    // the closed forms against a direct point search, every type, several cofactors
    for (const CurveContext& c : {CurveContext(1, -1), CurveContext(1, 3), CurveContext(-3, 7)}) {
        int seen[5] = {0, 0, 0, 0, 0};
        for (u64 p = 3; p < 200; p += 2) {
            if (!arith::is_prime(p) || c.is_bad_prime(p)) continue;
            ++seen[type_index(c.classify_prime(p))];
            for (i64 cof : {1, -1, 3, -7, 13}) {
                if (cof % static_cast<i64>(p) == 0) continue;
                bool shares = false;
                for (u64 q : arith::prime_divisors(static_cast<u64>(std::llabs(cof)))) shares |= c.is_bad_prime(q);
                if (shares) continue;
                const i64 d = cof * static_cast<i64>(p);
                for (auto which : {Isogeny::Phi, Isogeny::PhiHat})
                    CHECK(c.twisted_image(d, p, which) == c.searched_image(d, Place::prime(p), which));
            }
        }
        for (int t = 1; t <= 4; ++t) CHECK(seen[t] > 0);
    }
}

TEST_CASE("bad place images: memo against search") {
    for (const CurveContext& c : {CurveContext(1, -1), CurveContext(1, 3), CurveContext(2, -5)})
        for (i64 d : {1, -1, 3, -7, 5, 11, -13, 2, -6, 33})
            for (const auto& v : c.bad_places())
                for (auto which : {Isogeny::Phi, Isogeny::PhiHat})
                    CHECK(c.local_image(d, v, which) == c.searched_image(d, v, which));
}

TEST_CASE("duality at random places") {
    const CurveContext e(1, -1);
    CounterRng g(3, 0);
    int tested = 0;
    while (tested < 20) {
        i64 d = static_cast<i64>(g.below(3000)) + 1;
        if (arith::squarefree_kernel(d) != d) continue;
        if (g.bit()) d = -d;
        const auto places = places_of_twist(e, d);
        const Place v = places[g.below(places.size())];
        const auto w = e.local_image(d, v), wd = e.local_image_dual(d, v);
        for (const auto& b1 : w.basis())
            for (const auto& b2 : wd.basis()) CHECK(arith::hilbert_additive(b1, b2) == 0U);
        CHECK(w.dim() + wd.dim() == v.ambient_dim());
        ++tested;
    }
}

TEST_CASE("real place and kummer pairs") {
    // depends on the sign of b and on whether x^2 + a x + b has positive real roots
    CHECK(local::real_image(1, 3).dim() == 1);
    CHECK(local::real_image(1, -1).dim() == 0);
    CHECK(local::real_image(-5, 4).dim() == 1);
    CHECK(local::real_image(5, 4).dim() == 0);
    for (i64 a : {-3, 1, 2})
        for (i64 b : {-5, -1, 3, 7}) {
            if (a * a == 4 * b) continue;
            for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL}) {
                const auto kp = local::kummer_pair(a, b, Place::prime(p));
                CHECK(kp.image.annihilator() == kp.dual);
            }
        }
}

TEST_CASE("tamagawa exponent, two ways") {
    for (const CurveContext& c : {CurveContext(1, -1), CurveContext(1, 3)})
        for (i64 d : arith::SquarefreeStream::collect(500, c.bad_primes())) {
            int n2 = 0, n3 = 0;
            for (u64 p : arith::factor_squarefree(d).primes) {
                const auto t = c.classify_prime(p);
                n2 += t == PrimeType::Type2;
                n3 += t == PrimeType::Type3;
            }
            CHECK(c.tamagawa_ord2(d) == c.c_d(d) + n3 - n2);
        }
}

TEST_CASE("context copies share the memo") {
    const CurveContext e(1, 3);
    const CurveContext copy = e;
    (void)e.local_image(7, Place::prime(2));
    CHECK(copy.cache_size() == e.cache_size());
    CHECK(e.cache_size() > 0);
}
