#include "doctest.h"

#include "selmer/matrix_pipeline.hpp"
#include "selmer/selmer_oracle.hpp"

using namespace selmer;
using arith::Place;
using arith::i64;
using arith::u64;

TEST_CASE("characters") {
    CHECK(characters_at(Place::infinity()).size() == 1);
    CHECK(characters_at(Place::prime(2)).size() == 3);
    CHECK(characters_at(Place::prime(11)).size() == 2);

    const Place two = Place::prime(2);
    // chi has kernel {1, 5}, chi' has kernel {1, 3} on units mod 8
    CHECK(character_value(Character::Chi, arith::square_class(5, two)) == 0U);
    CHECK(character_value(Character::Chi, arith::square_class(3, two)) == 1U);
    CHECK(character_value(Character::ChiPrime, arith::square_class(3, two)) == 0U);
    CHECK(character_value(Character::ChiPrime, arith::square_class(7, two)) == 1U);
    CHECK(character_value(Character::Ord, arith::square_class(6, two)) == 1U);
    CHECK(character_value(Character::Ord, arith::square_class(-1, Place::infinity())) == 1U);
    CHECK(character_value(Character::Chi, arith::square_class(2, Place::prime(7))) == 0U);
    CHECK(character_value(Character::Chi, arith::square_class(3, Place::prime(7))) == 1U);

    // the characters at a place separate its classes
    for (const Place v : {Place::infinity(), two, Place::prime(3), Place::prime(13)}) {
        const auto cls = arith::all_classes(v);
        for (std::size_t i = 0; i < cls.size(); ++i)
            for (std::size_t j = i + 1; j < cls.size(); ++j) {
                bool differ = false;
                for (auto c : characters_at(v)) differ |= character_value(c, cls[i]) != character_value(c, cls[j]);
                CHECK(differ);
            }
    }
}

TEST_CASE("hilbert symbol with delta' as a character sum") {
    const CurveContext e(1, -1);
    // (x, -1) at infinity is the sign of x; -1 is a square mod 5; at 2 it is x = 3 mod 4
    CHECK(hilbert_character_expansion(e, Place::infinity()) == std::vector<unsigned>{1});
    CHECK(hilbert_character_expansion(e, Place::prime(5)) == std::vector<unsigned>{0, 0});
    CHECK(hilbert_character_expansion(e, Place::prime(2)) == std::vector<unsigned>{0, 1, 0});

    const CurveContext f(1, 3);
    CHECK(hilbert_character_expansion(f, Place::prime(11)) == std::vector<unsigned>{0, 0});  // 5^2 = 3 mod 11
    CHECK(hilbert_character_expansion(f, Place::infinity()) == std::vector<unsigned>{0});

    for (const CurveContext& c : {e, f, CurveContext(-3, 7)})
        for (const auto& v : c.bad_places()) {
            const auto coef = hilbert_character_expansion(c, v);
            const auto chars = characters_at(v);
            for (const auto& x : arith::all_classes(v)) {
                unsigned s = 0;
                for (std::size_t k = 0; k < chars.size(); ++k) s ^= coef[k] & character_value(chars[k], x);
                CHECK(s == arith::hilbert_additive(x, arith::square_class(c.delta_prime(), v)));
            }
        }
}

TEST_CASE("pivot place") {
    CHECK(pivot_place(CurveContext(1, -1)) == Place::prime(5));
    CHECK(pivot_place(CurveContext(1, 3)) == Place::infinity());
}

TEST_CASE("line labels round trip") {
    for (auto kind : {LineKind::URow, LineKind::WRow, LineKind::Column})
        for (bool tw : {false, true})
            for (std::uint32_t idx : {0U, 3U, 70000U})
                for (auto ch : {Character::Ord, Character::Chi, Character::ChiPrime})
                    for (std::uint8_t b : {0, 1, 255})
                        for (bool pass : {false, true}) {
                            const LineLabel l{kind, Site{tw, idx}, ch, b, pass};
                            CHECK(LineLabel::decode(l.encode()) == l);
                        }
    const CurveContext e(1, -1);
    CHECK(LineLabel{LineKind::Column, Site{false, 1}, Character::ChiPrime, 0, false}.to_string(e) == "chi'_2");
}

TEST_CASE("the full matrix: shape and right nullvector") {
    for (const CurveContext& c : {CurveContext(1, -1), CurveContext(1, 3)}) {
        const Pipeline pl(c);
        for (i64 d : arith::SquarefreeStream::collect(700, c.bad_primes())) {
            CAPTURE(d);
            const ArithmeticOracle o(c, d);
            const TwistData td = analyze(c, o);
            const auto m = pl.build_M(td, o);
            const auto t = static_cast<int>(places_of_twist(c, d).size());
            CHECK(static_cast<int>(m.cols()) == 2 * t);
            CHECK(static_cast<int>(m.rows()) == 2 * t + td.u() - 1);
            const auto v = pl.right_nullvector(m, td);
            CHECK(v.any());
            CHECK_FALSE(m.right_multiply(v).any());
        }
    }
}

TEST_CASE("surgery keeps the left nullity") {
    const CurveContext f(1, 3);
    const Pipeline pl(f);
    const SurgeryOptions traced{true, true};
    for (i64 d : {1, -1, 5 * 7 * 13, -17 * 19 * 23 * 29, 37 * 41 * 43 * 47 * 53}) {
        CAPTURE(d);
        const ArithmeticOracle o(f, d);
        const TwistData td = analyze(f, o);
        const auto m = pl.build_M(td, o);
        SurgeryResult res;
        REQUIRE_NOTHROW(res = surgery(m, f, traced));
        CHECK_FALSE(res.steps.empty());
        CHECK(f2::left_nullity(res.mhat) == f2::left_nullity(m));
        CHECK(static_cast<int>(res.mhat.rows()) - static_cast<int>(res.mhat.cols()) == td.u());

        const auto direct = pl.build_Mhat_direct(td, o, true);
        const auto reduced = pl.canonical_layout(res.mhat, td);
        CHECK(reduced.same_entries(direct));
        CHECK(reduced.row_labels() == direct.row_labels());
        CHECK(reduced.col_labels() == direct.col_labels());
    }
}

TEST_CASE("untwisted reduced matrix is the memoised block") {
    for (const CurveContext& c : {CurveContext(1, -1), CurveContext(1, 3)}) {
        const Pipeline pl(c);
        for (i64 d : {1, -1}) {
            const ArithmeticOracle o(c, d);
            const TwistData td = analyze(c, o);
            const auto red = pl.orig_reduction(td.d_classes);
            CHECK(pl.build_Mhat_direct(o).same_entries(red->a11));
            CHECK(red->transform.size() == red->psi_orig.size());
        }
        CHECK(pl.selmer_rank(1) == 1U);
    }
}

TEST_CASE("matrix rank against the descent oracle") {
    for (const CurveContext& c : {CurveContext(1, -1), CurveContext(1, 3), CurveContext(-3, 7)}) {
        const Pipeline pl(c);
        for (i64 d : arith::SquarefreeStream::collect(500, c.bad_primes())) {
            CAPTURE(d);
            const unsigned r = pl.selmer_rank(d);
            CHECK(r >= 1U);
            CHECK(r == brute_force_selmer(c, d).phi.dim);
        }
    }
    const CurveContext f(1, 3);
    const Pipeline pl(f);
    CHECK_THROWS_AS((void)pl.selmer_rank(3 * 7), std::invalid_argument);
}

TEST_CASE("a flipped symbol changes some rank") {
    const CurveContext e(1, -1);
    const Pipeline pl(e);
    int changed = 0, tried = 0;
    for (i64 d : arith::SquarefreeStream::collect(1500, e.bad_primes())) {
        const ArithmeticOracle o(e, d);
        if (o.size() < 2) continue;
        auto t = SymbolTable::record(e, o);
        CHECK(pl.selmer_rank(t) == pl.selmer_rank(o));
        t.flip_pair(0, 1);
        changed += pl.selmer_rank(t) != pl.selmer_rank(o);
        ++tried;
    }
    CHECK(tried > 100);
    CHECK(changed > 0);
}
