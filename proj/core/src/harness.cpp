#include "selmer/harness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "selmer/cl_constants.hpp"
#include "selmer/parallel.hpp"
#include "selmer/selmer_oracle.hpp"
#include "selmer/symbols.hpp"

namespace selmer::harness {

using arith::i64;
using arith::u64;

std::string to_string(SweepMode m) { return m == SweepMode::Coprime ? "coprime" : "full"; }

SweepMode parse_mode(const std::string& s) {
    if (s == "coprime") return SweepMode::Coprime;
    if (s == "full") return SweepMode::Full;
    throw std::invalid_argument("unknown sweep mode '" + s + "' (coprime|full)");
}

bool TwistRecord::in_s_prime() const noexcept {
    return std::all_of(s_prime.begin(), s_prime.end(), [](bool b) { return b; });
}

bool TwistRecord::in_s_double_prime() const noexcept { return s_prime[0] && s_prime[1] && s_prime[2] && s_prime[3]; }

bool omega_window(int omega, u64 X) {
    if (X < 3) return false;  // log log X <= 0
    const double L = std::log(std::log(static_cast<double>(X)));
    return std::fabs(omega - L) < std::pow(L, 0.625);
}

bool enough_of_each_type(const std::array<int, 5>& n, int omega) {
    for (int t = 1; t <= 4; ++t)
        if (!(10 * n[t] > omega)) return false;
    return true;
}

std::uint64_t Stratum::total(int u) const {
    auto it = by_u.find(u);
    if (it == by_u.end()) return 0;
    std::uint64_t s = 0;
    for (auto [r, c] : it->second) s += c;
    return s;
}

std::uint64_t Stratum::total() const {
    std::uint64_t s = 0;
    for (const auto& [u, h] : by_u) s += total(u);
    return s;
}

const Stratum& SweepReport::stratum(const std::string& name) const {
    for (const auto& s : strata)
        if (s.name == name) return s;
    throw std::out_of_range("no stratum named " + name);
}

namespace {

// Positive squarefree m composed of bad primes -> E^m, when it fits.
struct TwistFamily {
    std::map<u64, std::optional<CurveContext>> curves;

    explicit TwistFamily(const CurveContext& ctx) {
        const auto& bad = ctx.bad_primes();
        const std::size_t k = bad.size();
        for (std::size_t mask = 1; mask < (std::size_t{1} << k); ++mask) {
            u64 m = 1;
            bool overflow = false;
            for (std::size_t i = 0; i < k; ++i) {
                if (!((mask >> i) & 1U)) continue;
                if (m > (u64{1} << 40) / bad[i]) overflow = true;
                m *= bad[i];
            }
            std::optional<CurveContext> c;
            if (!overflow) {
                try {
                    c.emplace(ctx.A() * static_cast<i64>(m), ctx.B() * static_cast<i64>(m) * static_cast<i64>(m));
                } catch (const CurveRejected&) {
                }
            }
            curves.emplace(m, std::move(c));
        }
    }
};

TwistRecord make_record(const CurveContext& ctx, const Pipeline* pipeline, const TwistFamily* family, i64 d, u64 X) {
    TwistRecord rec;
    rec.d = d;
    const auto fac = arith::factor_squarefree(d);
    rec.omega = static_cast<int>(fac.primes.size());
    for (u64 p : fac.primes) {
        if (ctx.is_bad_prime(p)) {
            rec.m *= p;
            continue;
        }
        const PrimeType t = ctx.classify_prime(p);
        rec.prime_types.push_back(t);
        ++rec.n[static_cast<std::size_t>(type_index(t))];
    }

    const SelmerResult s = brute_force_selmer(ctx, d);
    rec.r_oracle = s.phi.dim;
    rec.r_phihat = s.phihat.dim;
    rec.u = s.u();
    rec.c_d = ctx.c_d(d);

    if (pipeline != nullptr && rec.m == 1) rec.r_matrix = pipeline->selmer_rank(d);

    if (family != nullptr && rec.m > 1) {
        const auto& twist = family->curves.at(rec.m);
        if (twist) rec.m_twist_agrees = brute_force_selmer(*twist, d / static_cast<i64>(rec.m)).phi.dim == rec.r_oracle;
    }

    rec.s_prime[0] = d > 0 && static_cast<u64>(d) <= X;
    rec.s_prime[1] = true;  // the sweep only visits squarefree d
    rec.s_prime[2] = rec.m == 1;
    rec.s_prime[3] = true;  // membership is always read off for the record's own u
    rec.s_prime[4] = omega_window(rec.omega, X);
    rec.s_prime[5] = enough_of_each_type(rec.n, rec.omega);
    return rec;
}

}  // namespace

SweepReport sweep(const CurveContext& ctx, u64 X, SweepMode mode, unsigned workers) {
    if (X < 1) throw std::invalid_argument("sweep: X must be at least 1");
    SweepReport rep;
    rep.A = ctx.A();
    rep.B = ctx.B();
    rep.X = X;
    rep.mode = mode;

    const std::vector<u64> none;
    const auto ds = mode == SweepMode::Coprime ? arith::SquarefreeStream::collect(X, ctx.bad_primes())
                                               : arith::SquarefreeStream::collect(X, none);

    std::optional<Pipeline> pipeline;
    std::optional<TwistFamily> family;
    if (mode == SweepMode::Coprime)
        pipeline.emplace(ctx);
    else
        family.emplace(ctx);

    using Part = std::vector<TwistRecord>;
    rep.records = chunked_map_reduce(
        ds.size(), 256, workers, Part{},
        [&](u64 b, u64 e) {
            Part part;
            part.reserve(e - b);
            for (u64 i = b; i < e; ++i)
                part.push_back(make_record(ctx, pipeline ? &*pipeline : nullptr, family ? &*family : nullptr, ds[i], X));
            return part;
        },
        [](Part& acc, Part&& p) { acc.insert(acc.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end())); });

    Stratum all{"all", {}}, pos{"positive", {}}, s2{"s_double_prime", {}}, s1{"s_prime", {}};
    for (const auto& r : rep.records) {
        const int rr = static_cast<int>(r.r_oracle);
        ++all.by_u[r.u][rr];
        if (r.d > 0) ++pos.by_u[r.u][rr];
        if (r.in_s_double_prime()) ++s2.by_u[r.u][rr];
        if (r.in_s_prime()) ++s1.by_u[r.u][rr];

        if (r.r_matrix && *r.r_matrix != r.r_oracle) ++rep.matrix_mismatches;
        if (r.u != r.c_d + r.n[3] - r.n[2]) ++rep.tamagawa_mismatches;
        if (rr < std::max(1, r.u + 1)) ++rep.support_violations;
        if (r.m > 1) {
            if (!r.m_twist_agrees)
                ++rep.m_twist_skipped;
            else if (!*r.m_twist_agrees)
                ++rep.m_twist_mismatches;
        }
    }
    rep.strata = {std::move(all), std::move(pos), std::move(s2), std::move(s1)};
    return rep;
}

std::vector<AlphaRow> alpha_rows(const Stratum& s, int r_max) {
    std::vector<AlphaRow> rows;
    for (const auto& [u, hist] : s.by_u) {
        const std::uint64_t tot = s.total(u);
        int top = std::max(r_max, std::max(1, u + 1));
        if (!hist.empty()) top = std::max(top, hist.rbegin()->first);
        for (int r = 0; r <= top; ++r) {
            AlphaRow row;
            row.u = u;
            row.r = r;
            auto it = hist.find(r);
            row.count = it == hist.end() ? 0 : it->second;
            row.frequency = tot ? static_cast<double>(row.count) / static_cast<double>(tot) : 0.0;
            row.alpha = static_cast<double>(cl::alpha(r, u));
            row.diff = row.frequency - row.alpha;
            rows.push_back(row);
        }
    }
    return rows;
}

MomentTable moment_report(const SweepReport& report, int k_max, const std::string& stratum) {
    if (k_max < 0 || k_max > 4) throw std::invalid_argument("moment_report: k_max must be in [0, 4]");
    MomentTable t;
    t.stratum = stratum;
    const Stratum& s = report.stratum(stratum);
    const Stratum& all = report.stratum("all");

    for (const auto& [u, hist] : all.by_u) {
        const std::uint64_t tot = s.total(u);
        if (tot == 0) {
            t.notes.push_back("u=" + std::to_string(u) + ": no records in " + stratum + ", row omitted");
            continue;
        }
        const auto& h = s.by_u.at(u);
        for (int k = 0; k <= k_max; ++k) {
            MomentRow row;
            row.k = k;
            row.u = u;
            row.count = tot;
            long double acc = 0;
            for (auto [r, c] : h) acc += static_cast<long double>(c) * std::ldexp(1.0L, k * r);
            row.empirical = static_cast<double>(acc / static_cast<long double>(tot));
            row.predicted = k == 0 ? 1.0 : static_cast<double>(cl::alpha_moment(k, u));
            row.divergence = row.empirical / row.predicted - 1.0;
            t.rows.push_back(row);
        }
    }
    return t;
}

bool VerifySummary::passed() const noexcept {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed(); });
}

namespace {

enum CheckId : std::size_t {
    kEquivalence,
    kTamagawa,
    kDuality,
    kRowColCount,
    kLabels,
    kTwoPath,
    kRightNull,
    kNumPerTwist,
};

const char* const kCheckNames[] = {
    "oracle_equivalence", "tamagawa_identity", "local_duality", "row_col_count",
    "surviving_labels",   "two_path_equality", "right_nullvector",
};

void note(Check& c, bool ok, i64 d) {
    ++c.tested;
    if (ok) return;
    ++c.failures;
    if (!c.first_failure) c.first_failure = d;
}

bool labels_match_types(const f2::BitMatrix& m, const TwistData& td) {
    std::vector<int> row_seen(td.n, 0), col_seen(td.n, 0);
    for (auto l : m.row_labels()) {
        const auto lab = LineLabel::decode(l);
        if (lab.site.twisted) ++row_seen.at(lab.site.index);
    }
    for (auto l : m.col_labels()) {
        const auto lab = LineLabel::decode(l);
        if (lab.site.twisted) ++col_seen.at(lab.site.index);
    }
    for (std::size_t i = 0; i < td.n; ++i) {
        const PrimeType t = td.types[i];
        const int want_row = (t == PrimeType::Type1 || t == PrimeType::Type3) ? 1 : 0;
        const int want_col = (t == PrimeType::Type1 || t == PrimeType::Type2) ? 1 : 0;
        if (row_seen[i] != want_row || col_seen[i] != want_col) return false;
    }
    return true;
}

f2::BitMatrix bad_block(const f2::BitMatrix& m) {
    std::vector<std::size_t> rows, cols;
    for (std::size_t i = 0; i < m.rows(); ++i)
        if (!LineLabel::decode(m.row_labels()[i]).site.twisted) rows.push_back(i);
    for (std::size_t j = 0; j < m.cols(); ++j)
        if (!LineLabel::decode(m.col_labels()[j]).site.twisted) cols.push_back(j);
    return m.select(rows, cols);
}

}  // namespace

VerifySummary verify(const CurveContext& ctx, u64 X, unsigned workers, std::size_t pairs) {
    VerifySummary sum;
    sum.A = ctx.A();
    sum.B = ctx.B();
    sum.X = X;

    const auto ds = arith::SquarefreeStream::collect(X, ctx.bad_primes());
    const Pipeline pipeline(ctx);

    using Part = std::vector<Check>;
    Part init(kNumPerTwist);
    for (std::size_t i = 0; i < kNumPerTwist; ++i) init[i].name = kCheckNames[i];

    auto per_twist = chunked_map_reduce(
        ds.size(), 128, workers, init,
        [&](u64 b, u64 e) {
            Part part(kNumPerTwist);
            for (u64 i = b; i < e; ++i) {
                const i64 d = ds[i];
                const ArithmeticOracle o(ctx, d);
                const TwistData td = analyze(ctx, o);
                const SelmerResult s = brute_force_selmer(ctx, d);

                const auto direct = pipeline.build_Mhat_direct(td, o, true);
                const unsigned r = static_cast<unsigned>(f2::left_nullity(direct)) + 1;
                note(part[kEquivalence], r == s.phi.dim, d);

                const int u_local = ctx.tamagawa_ord2(d);
                note(part[kTamagawa], s.u() == u_local && s.u() == td.u(), d);

                bool dual_ok = true;
                for (const auto& v : places_of_twist(ctx, d)) {
                    const auto w = ctx.local_image(d, v, Isogeny::Phi);
                    const auto wd = ctx.local_image(d, v, Isogeny::PhiHat);
                    dual_ok = dual_ok && w.annihilator() == wd && w.orthogonal_to(wd);
                }
                note(part[kDuality], dual_ok, d);

                note(part[kRowColCount], static_cast<int>(direct.rows()) - static_cast<int>(direct.cols()) == td.u(), d);

                const auto m = pipeline.build_M(td, o);
                note(part[kRightNull], !m.right_multiply(pipeline.right_nullvector(m, td)).any(), d);

                const auto reduced = pipeline.canonical_layout(surgery(m, ctx).mhat, td);
                note(part[kLabels], labels_match_types(reduced, td), d);
                note(part[kTwoPath],
                     reduced.same_entries(direct) && reduced.row_labels() == direct.row_labels() &&
                         reduced.col_labels() == direct.col_labels(),
                     d);
            }
            return part;
        },
        [](Part& acc, Part&& p) {
            for (std::size_t i = 0; i < acc.size(); ++i) {
                acc[i].tested += p[i].tested;
                acc[i].failures += p[i].failures;
                if (!acc[i].first_failure) acc[i].first_failure = p[i].first_failure;
            }
        });

    sum.checks = std::move(per_twist);

    // Bad-place block: pairs of d with the same classes at every bad place.
    Check locality{"bad_block_locality", 0, 0, std::nullopt, ""};
    std::map<std::vector<unsigned>, std::pair<i64, f2::BitMatrix>> first_seen;
    for (i64 d : ds) {
        if (locality.tested >= pairs) break;
        const ArithmeticOracle o(ctx, d);
        const TwistData td = analyze(ctx, o);
        std::vector<unsigned> key;
        for (const auto& c : td.d_classes) key.push_back(c.bits);
        auto block = bad_block(pipeline.canonical_layout(surgery(pipeline.build_M(td, o), ctx).mhat, td));
        auto it = first_seen.find(key);
        if (it == first_seen.end()) {
            first_seen.emplace(std::move(key), std::make_pair(d, std::move(block)));
            continue;
        }
        const auto& ref = it->second.second;
        note(locality,
             ref.same_entries(block) && ref.row_labels() == block.row_labels() && ref.col_labels() == block.col_labels(),
             d);
    }
    locality.detail = std::to_string(locality.tested) + " pairs";
    sum.checks.push_back(std::move(locality));

    // A corrupted symbol table has to disagree with the oracle somewhere.
    Check fault{"fault_injection_detected", 0, 0, std::nullopt, ""};
    std::uint64_t detected = 0;
    for (i64 d : ds) {
        const ArithmeticOracle o(ctx, d);
        if (o.size() < 2) continue;
        auto table = SymbolTable::record(ctx, o);
        table.flip_pair(0, 1);
        ++fault.tested;
        if (pipeline.selmer_rank(table) != brute_force_selmer(ctx, d).phi.dim) ++detected;
    }
    fault.detail = std::to_string(detected) + " of " + std::to_string(fault.tested) + " corrupted tables changed the rank";
    if (fault.tested > 0 && detected == 0) fault.failures = 1;
    sum.checks.push_back(std::move(fault));

    return sum;
}

}  // namespace selmer::harness
