#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "selmer/harness.hpp"
#include "selmer/report_io.hpp"

using namespace selmer;
using namespace selmer::harness;

namespace {

const SweepReport& fixture2_sweep() {
    static const SweepReport rep = sweep(CurveContext(1, 3), 2000, SweepMode::Coprime);
    return rep;
}

}  // namespace

TEST_CASE("modes") {
    CHECK(parse_mode("coprime") == SweepMode::Coprime);
    CHECK(parse_mode("full") == SweepMode::Full);
    CHECK(to_string(SweepMode::Full) == "full");
    CHECK_THROWS_AS(parse_mode("all"), std::invalid_argument);
}

TEST_CASE("membership conditions") {
    CHECK(omega_window(2, 2000));
    CHECK(omega_window(1, 2000));
    CHECK_FALSE(omega_window(4, 2000));
    CHECK_FALSE(omega_window(0, 2000));
    CHECK_FALSE(omega_window(1, 2));
    CHECK_FALSE(enough_of_each_type({0, 1, 1, 1, 1}, 10));  // 10 * 1 is not > 10
    CHECK(enough_of_each_type({0, 1, 1, 1, 1}, 9));
    CHECK_FALSE(enough_of_each_type({0, 3, 0, 3, 3}, 9));
}

TEST_CASE("coprime sweep") {
    const auto& rep = fixture2_sweep();
    CHECK(rep.records.size() == arith::SquarefreeStream::collect(2000, std::vector<arith::u64>{2, 3, 11}).size());
    CHECK(rep.matrix_mismatches == 0U);
    CHECK(rep.tamagawa_mismatches == 0U);
    CHECK(rep.support_violations == 0U);
    CHECK(rep.m_twist_mismatches == 0U);

    const auto& one = rep.records.front();
    CHECK(one.d == 1);
    CHECK(one.u == 0);
    CHECK(one.r_oracle == 1U);
    CHECK(one.n == std::array<int, 5>{0, 0, 0, 0, 0});

    for (const auto& r : rep.records) {
        REQUIRE(r.r_matrix.has_value());
        CHECK(r.u == r.c_d + r.n[3] - r.n[2]);
        CHECK(static_cast<int>(r.r_oracle) - static_cast<int>(r.r_phihat) == r.u);
        CHECK(r.m == 1U);
        CHECK(r.s_prime[0] == (r.d > 0));
        if (r.in_s_prime()) CHECK(r.in_s_double_prime());
    }

    CHECK(rep.stratum("all").total() == rep.records.size());
    CHECK(rep.stratum("positive").total() * 2 == rep.records.size());
    CHECK(rep.stratum("s_double_prime").total() == rep.stratum("positive").total());
    CHECK_THROWS_AS((void)rep.stratum("nope"), std::out_of_range);
}

TEST_CASE("alpha rows and moments") {
    const auto& rep = fixture2_sweep();
    const auto rows = alpha_rows(rep.stratum("all"));
    std::map<int, double> mass;
    for (const auto& a : rows) {
        mass[a.u] += a.frequency;
        CHECK(a.diff == doctest::Approx(a.frequency - a.alpha));
        if (a.r < std::max(1, a.u + 1)) CHECK(a.count == 0U);
    }
    for (auto [u, m] : mass) CHECK(m == doctest::Approx(1.0));

    const auto all = moment_report(rep, 2, "all");
    CHECK(all.notes.empty());
    for (const auto& m : all.rows)
        if (m.k == 0) {
            CHECK(m.empirical == doctest::Approx(1.0));
            CHECK(m.predicted == 1.0);
        }
    CHECK_THROWS_AS(moment_report(rep, 5), std::invalid_argument);

    // at this height no d has enough primes of every type
    const auto sp = moment_report(rep, 2, "s_prime");
    CHECK(sp.rows.empty());
    CHECK(sp.notes.size() == rep.stratum("all").by_u.size());
}

TEST_CASE("full sweep folds bad primes into the curve") {
    for (const CurveContext& c : {CurveContext(1, -1), CurveContext(1, 3)}) {
        const auto rep = sweep(c, 300, SweepMode::Full);
        CHECK(rep.records.size() == arith::SquarefreeStream::collect(300, std::vector<arith::u64>{}).size());
        CHECK(rep.m_twist_mismatches == 0U);
        CHECK(rep.m_twist_skipped == 0U);
        CHECK(rep.tamagawa_mismatches == 0U);
        int folded = 0;
        for (const auto& r : rep.records) {
            CHECK_FALSE(r.r_matrix.has_value());
            if (r.m > 1) {
                ++folded;
                CHECK(r.m_twist_agrees.value_or(false));
                CHECK_FALSE(r.s_prime[2]);
            }
        }
        CHECK(folded > 0);
    }
}

TEST_CASE("verify") {
    const auto a = verify(CurveContext(1, 3), 500);
    CHECK(a.passed());
    CHECK(a.checks.size() == 9);
    for (const auto& c : a.checks) {
        CAPTURE(c.name);
        CHECK(c.tested > 0U);
    }
    CHECK(verify(CurveContext(1, -1), 2000).passed());
}

TEST_CASE("reports") {
    const CurveContext f(1, 3);
    const auto a = sweep(f, 600, SweepMode::Full, 1);
    const auto b = sweep(f, 600, SweepMode::Full, 4);
    const auto text = report::sweep_json(a, true);
    CHECK(text == report::sweep_json(b, true));

    const auto j = nlohmann::json::parse(text);
    CHECK(j.at("schema_version") == report::kSchemaVersion);
    CHECK(j.at("mode") == "full");
    CHECK(j.at("twists").size() == a.records.size());
    CHECK(j.at("strata").contains("s_prime"));
    CHECK(text.find("time") == std::string::npos);
    CHECK(text.find("elapsed") == std::string::npos);

    const auto dir = std::filesystem::temp_directory_path() / "selmer_csv_test";
    std::filesystem::remove_all(dir);
    const auto files = report::write_sweep_csv(a, dir);
    REQUIRE_FALSE(files.empty());
    std::ifstream in(files.front());
    std::string header;
    std::getline(in, header);
    CHECK(header == "r,count,frequency,alpha_ru,diff");
    std::filesystem::remove_all(dir);

    const auto c = nlohmann::json::parse(report::constants_json(0, 10, 0));
    CHECK(c.at("values").size() == 11);
    CHECK(c.at("values")[0].at("alpha") == 0.0);
}
