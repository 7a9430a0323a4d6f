#include "doctest.h"

#include "json.hpp"
#include "selmer/selmer_oracle.hpp"
#include "selmer/symbols.hpp"

using namespace selmer;
using arith::i64;
using arith::u64;

namespace {

void same_symbols(const SymbolOracle& a, const SymbolOracle& b, const CurveContext& c) {
    REQUIRE(a.size() == b.size());
    CHECK(a.sign() == b.sign());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.residue(i) == b.residue(i));
        for (std::size_t j = 0; j < a.size(); ++j)
            if (i != j) CHECK(a.pair_symbol(i, j) == b.pair_symbol(i, j));
        const auto t = c.classify_residue(a.residue(i));
        if (t == PrimeType::Type1) CHECK(a.lambda(i) == b.lambda(i));
        if (t == PrimeType::Type3) CHECK(a.type3_twist_bit(i) == b.type3_twist_bit(i));
    }
}

}  // namespace

TEST_CASE("arithmetic oracle") {
    const CurveContext e(1, -1);
    const ArithmeticOracle o(e, -3 * 7 * 29);
    CHECK(o.sign() == -1);
    CHECK(o.primes() == std::vector<u64>{3, 7, 29});
    CHECK(o.residue(2) == 29 % 40);
    CHECK(o.pair_symbol(0, 1) == *arith::legendre_additive(3, 7));
    CHECK(o.pair_symbol(1, 0) == *arith::legendre_additive(7, 3));
    CHECK(o.lambda(2) == e.lambda(29));
    CHECK_THROWS_AS(ArithmeticOracle(e, 15), std::invalid_argument);
    CHECK_THROWS_AS(ArithmeticOracle(e, 2), std::invalid_argument);
}

TEST_CASE("record and JSON round trip") {
    const CurveContext f(1, 3);
    for (i64 d : {1, -1, 5 * 7 * 13, -17 * 19 * 23 * 29, 37 * 41 * 43}) {
        const ArithmeticOracle o(f, d);
        const auto t = SymbolTable::record(f, o);
        same_symbols(o, t, f);
        CHECK(t.reciprocity_holds());

        const auto text = t.to_json(f);
        const auto back = SymbolTable::from_json(f, text);
        same_symbols(t, back, f);
        CHECK(back.to_json(f) == text);

        const auto j = nlohmann::json::parse(text);
        CHECK(j.at("version") == SymbolTable::kVersion);
        CHECK(j.at("D") == f.D());
    }
}

TEST_CASE("from_json rejects mismatched input") {
    const CurveContext e(1, -1), f(1, 3);
    const auto text = SymbolTable::record(e, ArithmeticOracle(e, 3 * 7)).to_json(e);
    CHECK_THROWS_AS(SymbolTable::from_json(f, text), std::invalid_argument);  // other modulus
    auto j = nlohmann::json::parse(text);
    j["version"] = 99;
    CHECK_THROWS_AS(SymbolTable::from_json(e, j.dump()), std::invalid_argument);
    CHECK_THROWS_AS(SymbolTable::from_json(e, "{not json"), std::invalid_argument);
    j = nlohmann::json::parse(text);
    j["types"][0] = static_cast<int>(j["types"][0]) % 4 + 1;
    CHECK_THROWS_AS(SymbolTable::from_json(e, j.dump()), std::invalid_argument);
}

TEST_CASE("fault injection keeps or breaks reciprocity as intended") {
    const CurveContext e(1, -1);
    auto t = SymbolTable::record(e, ArithmeticOracle(e, 3 * 7 * 11));
    t.flip_pair(0, 2);
    CHECK(t.reciprocity_holds());
    t.set_pair_symbol(1, 2, t.pair_symbol(1, 2) ^ 1U);
    CHECK_FALSE(t.reciprocity_holds());

    auto l = SymbolTable::record(e, ArithmeticOracle(e, 29));
    const unsigned before = l.lambda(0);
    l.flip_lambda(0);
    CHECK(l.lambda(0) == (before ^ 1U));
    CHECK_THROWS_AS((void)SymbolTable(1, {3, 7}).lambda(0), MissingSymbol);
}

TEST_CASE("generator symbols and residue classes") {
    const CurveContext f(1, 3);
    for (u64 p = 5; p < 2000; p += 2) {
        if (!arith::is_prime(p) || f.is_bad_prime(p)) continue;
        const u64 r = p % f.D();
        CHECK(generator_symbol(-1, r) == *arith::legendre_additive(-1, p));
        for (u64 q : f.bad_primes())
            CHECK(generator_symbol(static_cast<i64>(q), r) == *arith::legendre_additive(static_cast<i64>(q), p));
        for (const auto& v : f.bad_places())
            CHECK(residue_class(v, r) == arith::square_class(static_cast<i64>(p), v));
    }
}

TEST_CASE("analyze") {
    const CurveContext e(1, -1);
    const i64 d = -3 * 11 * 29;  // 11 is type 2, 29 type 1
    const ArithmeticOracle o(e, d);
    const TwistData td = analyze(e, o);
    CHECK(td.n == 3);
    CHECK(td.sign == -1);
    CHECK(td.types[1] == PrimeType::Type2);
    CHECK(td.types[2] == PrimeType::Type1);
    CHECK(td.c_d == e.c_d(d));
    CHECK(td.u() == brute_force_selmer(e, d).u());
    for (std::size_t k = 0; k < e.bad_places().size(); ++k)
        CHECK(td.d_classes[k] == arith::square_class(d, e.bad_places()[k]));
    for (std::size_t i = 0; i < td.n; ++i) {
        const i64 p = static_cast<i64>(o.primes()[i]);
        CHECK(td.d_cofactor_symbol[i] == *arith::legendre_additive(d / p, static_cast<u64>(p)));
    }

    const TwistData one = analyze(e, SymbolTable(1, {}));
    CHECK(one.n == 0);
    CHECK(one.u() == 0);
}
