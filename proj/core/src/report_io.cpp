#include "selmer/report_io.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "selmer/cl_constants.hpp"

namespace selmer::report {

using nlohmann::json;

namespace {

json curve_json(arith::i64 A, arith::i64 B) { return json{{"A", A}, {"B", B}}; }

json histogram_json(const std::map<int, std::uint64_t>& h) {
    json a = json::array();
    for (auto [r, c] : h) a.push_back(json{{"r", r}, {"count", c}});
    return a;
}

json record_json(const harness::TwistRecord& r) {
    json types = json::array();
    for (auto t : r.prime_types) types.push_back(type_index(t));
    json j{{"d", r.d},
           {"types", types},
           {"n", {r.n[1], r.n[2], r.n[3], r.n[4]}},
           {"u", r.u},
           {"c_d", r.c_d},
           {"r_oracle", r.r_oracle},
           {"r_phihat", r.r_phihat},
           {"m", r.m},
           {"omega", r.omega},
           {"s_prime", r.s_prime}};
    j["r_matrix"] = r.r_matrix ? json(*r.r_matrix) : json(nullptr);
    if (r.m_twist_agrees) j["m_twist_agrees"] = *r.m_twist_agrees;
    return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::map<int, double> to_dist(const std::map<int, std::uint64_t>& h) {
    std::uint64_t tot = 0;
    for (auto [r, c] : h) tot += c;
    std::map<int, double> p;
    if (tot == 0) return p;
    for (auto [r, c] : h) p[r] = static_cast<double>(c) / static_cast<double>(tot);
    return p;
}

std::map<int, double> alpha_dist(int u, int r_max) {
    std::map<int, double> q;
    for (int r = 0; r <= r_max; ++r) {
        const double a = static_cast<double>(cl::alpha(r, u));
        if (a > 0) q[r] = a;
    }
    return q;
}

}  // namespace

std::string sweep_json(const harness::SweepReport& rep, bool include_records, int k_max) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "sweep";
    j["curve"] = curve_json(rep.A, rep.B);
    j["X"] = rep.X;
    j["mode"] = harness::to_string(rep.mode);
    j["records"] = rep.records.size();
    j["checks"] = json{{"matrix_mismatches", rep.matrix_mismatches},
                       {"tamagawa_mismatches", rep.tamagawa_mismatches},
                       {"support_violations", rep.support_violations},
                       {"m_twist_mismatches", rep.m_twist_mismatches},
                       {"m_twist_skipped", rep.m_twist_skipped}};

    json strata = json::object();
    for (const auto& s : rep.strata) {
        json sj;
        sj["total"] = s.total();
        json by_u = json::array();
        for (const auto& [u, h] : s.by_u) by_u.push_back(json{{"u", u}, {"total", s.total(u)}, {"ranks", histogram_json(h)}});
        sj["by_u"] = by_u;
        json rows = json::array();
        for (const auto& a : harness::alpha_rows(s))
            rows.push_back(json{{"u", a.u},
                                {"r", a.r},
                                {"count", a.count},
                                {"frequency", a.frequency},
                                {"alpha", a.alpha},
                                {"diff", a.diff}});
        sj["alpha_comparison"] = rows;

        const auto mt = harness::moment_report(rep, k_max, s.name);
        json mrows = json::array();
        for (const auto& m : mt.rows)
            mrows.push_back(json{{"k", m.k},
                                 {"u", m.u},
                                 {"count", m.count},
                                 {"empirical", m.empirical},
                                 {"predicted", m.predicted},
                                 {"divergence", m.divergence}});
        sj["moments"] = mrows;
        sj["moment_notes"] = mt.notes;
        strata[s.name] = sj;
    }
    j["strata"] = strata;

    if (include_records) {
        json recs = json::array();
        for (const auto& r : rep.records) recs.push_back(record_json(r));
        j["twists"] = recs;
    }
    return dump(j);
}

std::string verify_json(const harness::VerifySummary& sum) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "verify";
    j["curve"] = curve_json(sum.A, sum.B);
    j["X"] = sum.X;
    j["passed"] = sum.passed();
    json checks = json::array();
    for (const auto& c : sum.checks) {
        json cj{{"name", c.name}, {"tested", c.tested}, {"failures", c.failures}, {"passed", c.passed()}};
        cj["first_failure"] = c.first_failure ? json(*c.first_failure) : json(nullptr);
        if (!c.detail.empty()) cj["detail"] = c.detail;
        checks.push_back(cj);
    }
    j["checks"] = checks;
    return dump(j);
}

std::string simulate_json(const CurveContext& ctx, const model::AlphaEstimate& est, const std::vector<int>& us,
                          int r_max) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "simulate";
    j["curve"] = curve_json(ctx.A(), ctx.B());
    j["n"] = est.n;
    j["trials"] = est.trials;
    j["seed"] = est.seed;
    json strata = json::array();
    for (int u : us) {
        json sj{{"u", u}, {"acceptance", est.acceptance(u)}};
        auto it = est.by_u.find(u);
        if (it == est.by_u.end() || it->second.accepted == 0) {
            sj["accepted"] = 0;
            sj["note"] = "no draws with this u";
            strata.push_back(sj);
            continue;
        }
        const auto& st = it->second;
        sj["accepted"] = st.accepted;
        sj["accepted_typed"] = st.accepted_typed;
        sj["ranks"] = histogram_json(st.ranks);
        sj["ranks_typed"] = histogram_json(st.ranks_typed);
        const auto p = to_dist(st.ranks), pt = to_dist(st.ranks_typed);
        const auto q = alpha_dist(u, r_max);
        json alphas = json::array();
        for (auto [r, a] : q) alphas.push_back(json{{"r", r}, {"alpha", a}});
        sj["alpha"] = alphas;
        sj["tv_alpha"] = model::total_variation(p, q);
        sj["tv_typed_vs_plain"] = pt.empty() ? json(nullptr) : json(model::total_variation(p, pt));
        sj["moments"] = json::array();
        for (int k = 1; k <= 2; ++k)
            sj["moments"].push_back(
                json{{"k", k}, {"empirical", st.moment(k)}, {"predicted", static_cast<double>(cl::alpha_moment(k, u))}});
        strata.push_back(sj);
    }
    j["by_u"] = strata;
    return dump(j);
}

std::string randmat_json(const f2::NullityHistogram& h, std::uint64_t seed) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "randmat";
    j["rows"] = h.rows;
    j["cols"] = h.cols;
    j["trials"] = h.trials;
    j["seed"] = seed;
    const int u = static_cast<int>(h.cols) - static_cast<int>(h.rows);
    j["u"] = u;
    std::map<int, double> p, q;
    json rows = json::array();
    std::size_t top = 8;
    if (!h.counts.empty()) top = std::max(top, h.counts.rbegin()->first);
    for (std::size_t r = 0; r <= top; ++r) {
        const double f = h.frequency(r);
        const bool in_support = static_cast<int>(r) + u >= 0;
        const double a = in_support ? static_cast<double>(cl::alpha_prime(2, u, static_cast<int>(r))) : 0.0;
        auto it = h.counts.find(r);
        rows.push_back(json{{"nullity", r},
                            {"count", it == h.counts.end() ? 0 : it->second},
                            {"frequency", f},
                            {"alpha_prime", a}});
        if (f > 0) p[static_cast<int>(r)] = f;
        if (a > 0) q[static_cast<int>(r)] = a;
    }
    j["histogram"] = rows;
    j["tv"] = model::total_variation(p, q);
    return dump(j);
}

std::string constants_json(int u, int r_max, std::uint64_t p) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "constants";
    j["u"] = u;
    j["r_max"] = r_max;
    json rows = json::array();
    if (p == 0) {
        const auto t = cl::alpha_table(u, r_max);
        for (int r = 0; r <= r_max; ++r) rows.push_back(json{{"r", r}, {"alpha", static_cast<double>(t.at(r))}});
        j["tail_mass"] = static_cast<double>(t.tail_mass);
    } else {
        j["p"] = p;
        const auto t = cl::alpha_prime_table(p, u, r_max);
        for (int r = 0; r <= r_max; ++r) rows.push_back(json{{"r", r}, {"alpha_prime", static_cast<double>(t.at(r))}});
        j["tail_mass"] = static_cast<double>(t.tail_mass);
    }
    j["values"] = rows;
    return dump(j);
}

std::vector<std::filesystem::path> write_sweep_csv(const harness::SweepReport& rep, const std::filesystem::path& dir,
                                                   const std::string& stratum) {
    std::filesystem::create_directories(dir);
    const auto& s = rep.stratum(stratum);
    const auto rows = harness::alpha_rows(s);
    std::vector<std::filesystem::path> written;
    std::ofstream out;
    int cur = 0;
    bool open = false;
    for (const auto& a : rows) {
        if (!open || a.u != cur) {
            if (open) out.close();
            const auto path = dir / (stratum + "_u" + std::to_string(a.u) + ".csv");
            out.open(path);
            if (!out) throw std::runtime_error("cannot write " + path.string());
            out << "r,count,frequency,alpha_ru,diff\n";
            written.push_back(path);
            cur = a.u;
            open = true;
        }
        out << a.r << ',' << a.count << ',' << json(a.frequency).dump() << ',' << json(a.alpha).dump() << ','
            << json(a.diff).dump() << '\n';
    }
    return written;
}

}  // namespace selmer::report
