// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "selmer/bit_matrix.hpp"
#include "selmer/cl_constants.hpp"
#include "selmer/harness.hpp"
#include "selmer/model_p.hpp"
#include "selmer/report_io.hpp"

using namespace selmer;

namespace {

int failed = 0;

void criterion(int id, const char* what, bool ok, const std::string& detail) {
    std::printf("[%s] %d %s: %s\n", ok ? "PASS" : "FAIL", id, what, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failed;
}

std::string fmt(const char* f, double a, double b = 0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

const harness::Check* find(const harness::VerifySummary& s, const std::string& name) {
    for (const auto& c : s.checks)
        if (c.name == name) return &c;
    return nullptr;
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<CurveContext> fixtures{CurveContext(1, -1), CurveContext(1, 3)};
    constexpr arith::u64 kX = 2000;

    std::vector<harness::SweepReport> sweeps;
    std::vector<harness::VerifySummary> checks;
    for (const auto& c : fixtures) {
        sweeps.push_back(harness::sweep(c, kX, harness::SweepMode::Coprime));
        checks.push_back(harness::verify(c, kX, 0, 50));
    }

    {
        std::uint64_t n = 0, bad = 0;
        for (std::size_t i = 0; i < fixtures.size(); ++i) {
            n += sweeps[i].records.size();
            bad += sweeps[i].matrix_mismatches + find(checks[i], "oracle_equivalence")->failures;
        }
        criterion(1, "matrix rank equals descent rank, |d| <= 2000, both curves", bad == 0,
                  std::to_string(n) + " twists, " + std::to_string(bad) + " mismatches");
    }

    {
        std::uint64_t n = 0, bad = 0;
        for (std::size_t i = 0; i < fixtures.size(); ++i) {
            const auto* c = find(checks[i], "tamagawa_identity");
            n += c->tested;
            bad += c->failures + sweeps[i].tamagawa_mismatches + sweeps[i].support_violations;
        }
        criterion(2, "Tamagawa exponent identity and rank support", bad == 0,
                  std::to_string(n) + " twists, " + std::to_string(bad) + " failures");
    }

    {
        std::string detail;
        bool ok = true;
        for (const auto& s : checks)
            for (const auto& c : s.checks) {
                if (c.name == "oracle_equivalence" || c.name == "tamagawa_identity") continue;
                ok = ok && c.passed() && c.tested > 0;
                if (!c.passed() || c.tested == 0) detail += c.name + " ";
            }
        const auto* loc = find(checks[0], "bad_block_locality");
        criterion(3, "structure: duality, counts, labels, two paths, nullvector, locality, fault injection", ok,
                  ok ? "all checks passed, " + std::to_string(loc->tested) + " locality pairs on first curve"
                     : "failed: " + detail);
    }

    {
        double worst = 0;
        for (int u = -3; u <= 3; ++u) {
            const auto h = f2::nullity_histogram(200, static_cast<std::size_t>(200 + u), 100000, 1000 + u);
            std::map<int, double> p, q;
            for (auto [k, c] : h.counts) p[static_cast<int>(k)] = h.frequency(k);
            for (int r = 0; r <= 20; ++r) q[r] = static_cast<double>(cl::alpha_prime(2, u, r));
            worst = std::max(worst, model::total_variation(p, q));
        }
        criterion(4, "random 200 x (200+u) nullity vs alpha', u in -3..3", worst <= 0.01,
                  fmt("max TV %.4f (tolerance 0.01)", worst));
    }

    {
        double worst_sum = 0, worst_id = 0;
        for (int u = -4; u <= 4; ++u) {
            const auto t = cl::alpha_table(u, 60);
            long double s = 0;
            for (auto v : t.values) s += v;
            worst_sum = std::max(worst_sum, std::fabs(static_cast<double>(s) - 1.0));
            for (int r = 0; r <= 20; ++r) {
                worst_id = std::max(worst_id, std::fabs(static_cast<double>(cl::alpha(r, u) - cl::alpha_prime(2, -u, r - 1))));
                worst_id = std::max(worst_id, std::fabs(static_cast<double>(cl::alpha(r, u) - cl::alpha(r - u, -u))));
            }
        }
        criterion(5, "alpha tables sum to 1, bridge and reflection identities", worst_sum <= 1e-9 && worst_id <= 1e-12,
                  fmt("sum error %.2e, identity error %.2e", worst_sum, worst_id));
    }

    const Pipeline pipeline(fixtures[0]);
    const std::vector<int> us{-2, -1, 0, 1, 2};
    const auto est = model::estimate_alpha_until(pipeline, 60, us, 10000, 2024, 5000000);
    {
        double tv = 0, tv_typed = 0;
        std::uint64_t least = ~std::uint64_t{0};
        for (int u : us) {
            const auto& s = est.at(u);
            least = std::min(least, s.accepted);
            std::map<int, double> p, pt, q;
            for (auto [r, c] : s.ranks) p[r] = s.frequency(r);
            for (auto [r, c] : s.ranks_typed) pt[r] = s.frequency_typed(r);
            for (int r = 0; r <= 20; ++r) q[r] = static_cast<double>(cl::alpha(r, u));
            tv = std::max(tv, model::total_variation(p, q));
            tv_typed = std::max(tv_typed, model::total_variation(p, pt));
        }
        criterion(6, "model at n = 60 vs alpha(r, u), u in -2..2", tv <= 0.03 && tv_typed <= 0.01 && least >= 10000,
                  fmt("max TV %.4f (0.03), typed vs plain %.4f (0.01)", tv, tv_typed) + ", min accepted " +
                      std::to_string(least) + ", trials " + std::to_string(est.trials));
    }

    {
        const auto fr = model::fullrank_probe(pipeline, 60, 20000, 77);
        const double rate = fr.failure_rate_at_least(10);
        const auto tc = model::type_count_probe(100, 10000, 78);
        criterion(7, "upper block full rank for n2 >= 10, type counts at n = 100", rate <= 0.01 && tc.frequency() >= 0.99,
                  fmt("failure rate %.4f (0.01), type frequency %.4f (0.99)", rate, tc.frequency()));
    }

    {
        const auto& s = est.at(0);
        const double e1 = s.moment(1), p1 = static_cast<double>(cl::alpha_moment(1, 0));
        const double e2 = s.moment(2), p2 = static_cast<double>(cl::alpha_moment(2, 0));
        const double d1 = std::fabs(e1 / p1 - 1), d2 = std::fabs(e2 / p2 - 1);
        criterion(8, "first and second moments at u = 0", d1 <= 0.1 && d2 <= 0.1,
                  fmt("k=1 divergence %.4f", d1) + fmt(", k=2 divergence %.4f (0.10)", d2));
    }

    {
        const auto a = harness::sweep(fixtures[1], 1500, harness::SweepMode::Full, 1);
        const auto b = harness::sweep(fixtures[1], 1500, harness::SweepMode::Full, 4);
        const bool same_sweep = report::sweep_json(a, true) == report::sweep_json(b, true);
        const Pipeline p2(fixtures[1]);
        const auto m1 = model::estimate_alpha_n(p2, 30, 20000, 5, 1);
        const auto m4 = model::estimate_alpha_n(p2, 30, 20000, 5, 4);
        const bool same_sim = report::simulate_json(fixtures[1], m1, us) == report::simulate_json(fixtures[1], m4, us);
        criterion(9, "reports identical for 1 and 4 workers", same_sweep && same_sim,
                  std::string("sweep ") + (same_sweep ? "same" : "differs") + ", simulate " + (same_sim ? "same" : "differs"));
    }

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::fprintf(stderr, "acceptance finished in %.1f s\n", secs);
    return failed == 0 ? 0 : 1;
}
