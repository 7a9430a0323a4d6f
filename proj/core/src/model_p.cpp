#include "selmer/model_p.hpp"

#include <cmath>
#include <numeric>

#include "selmer/bit_matrix.hpp"
#include "selmer/parallel.hpp"

namespace selmer::model {

using arith::u64;

SymbolTable sample_symbols(const CurveContext& ctx, std::size_t n, CounterRng& rng) {
    const u64 D = ctx.D();
    const int sign = rng.bit() ? -1 : 1;
    std::vector<u64> res(n);
    for (auto& r : res) {
        do r = rng.below(D);
        while (std::gcd(r, D) != 1);
    }
    SymbolTable t(sign, res);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const unsigned b = rng.bit() ? 1U : 0U;
            t.set_pair_symbol(i, j, b);
            t.set_pair_symbol(j, i, b ^ (arith::eps(res[i]) & arith::eps(res[j])));
        }
    for (std::size_t i = 0; i < n; ++i) {
        const PrimeType ty = ctx.classify_residue(res[i]);
        if (ty == PrimeType::Type1) t.set_lambda(i, rng.bit() ? 1U : 0U);
        if (ty == PrimeType::Type3) t.set_type3_twist_bit(i, rng.bit() ? 1U : 0U);
    }
    return t;
}

namespace {

double ratio(std::uint64_t a, std::uint64_t b) { return b ? static_cast<double>(a) / static_cast<double>(b) : 0.0; }

double hist_frequency(const Histogram& h, std::uint64_t total, int r) {
    auto it = h.find(r);
    return it == h.end() ? 0.0 : ratio(it->second, total);
}

void merge(Histogram& into, const Histogram& from) {
    for (auto [k, v] : from) into[k] += v;
}

bool typed(const TwistData& td) {
    const int t = static_cast<int>(type_threshold(td.n));
    return td.counts[1] >= t && td.counts[2] >= t && td.counts[3] >= t && td.counts[4] >= t;
}

}  // namespace

double Stratum::frequency(int r) const { return hist_frequency(ranks, accepted, r); }
double Stratum::frequency_typed(int r) const { return hist_frequency(ranks_typed, accepted_typed, r); }

double Stratum::moment(int k) const {
    long double s = 0;
    for (auto [r, c] : ranks) s += std::pow(2.0L, static_cast<long double>(k) * r) * static_cast<long double>(c);
    return accepted ? static_cast<double>(s / static_cast<long double>(accepted)) : 0.0;
}

double AlphaEstimate::acceptance(int u) const {
    auto it = by_u.find(u);
    return it == by_u.end() ? 0.0 : ratio(it->second.accepted, trials);
}

const Stratum& AlphaEstimate::at(int u) const {
    auto it = by_u.find(u);
    if (it == by_u.end() || it->second.accepted == 0)
        throw InsufficientConditioning("no draw with Tamagawa exponent " + std::to_string(u));
    return it->second;
}

namespace {

using StrataMap = std::map<int, Stratum>;

StrataMap run_range(const Pipeline& pl, std::size_t n, std::uint64_t b, std::uint64_t e, std::uint64_t seed) {
    StrataMap out;
    const CurveContext& ctx = pl.curve();
    for (std::uint64_t t = b; t < e; ++t) {
        CounterRng rng(seed, t);
        const SymbolTable s = sample_symbols(ctx, n, rng);
        const TwistData td = analyze(ctx, s);
        const int r = static_cast<int>(f2::left_nullity(pl.build_Mhat_direct(td, s))) + 1;
        Stratum& st = out[td.u()];
        ++st.accepted;
        ++st.ranks[r];
        if (typed(td)) {
            ++st.accepted_typed;
            ++st.ranks_typed[r];
        }
    }
    return out;
}

void merge_strata(StrataMap& acc, const StrataMap& part) {
    for (const auto& [u, st] : part) {
        Stratum& a = acc[u];
        a.accepted += st.accepted;
        a.accepted_typed += st.accepted_typed;
        merge(a.ranks, st.ranks);
        merge(a.ranks_typed, st.ranks_typed);
    }
}

StrataMap run_trials(const Pipeline& pl, std::size_t n, std::uint64_t first, std::uint64_t count, std::uint64_t seed,
                     unsigned workers) {
    return chunked_map_reduce<StrataMap>(
        count, 1024, workers, StrataMap{},
        [&](std::uint64_t b, std::uint64_t e) { return run_range(pl, n, first + b, first + e, seed); },
        [](StrataMap& acc, StrataMap part) { merge_strata(acc, part); });
}

}  // namespace

AlphaEstimate estimate_alpha_n(const Pipeline& pl, std::size_t n, std::uint64_t trials, std::uint64_t seed,
                               unsigned workers) {
    if (trials == 0) throw std::invalid_argument("estimate_alpha_n: trials must be >= 1");
    AlphaEstimate est;
    est.n = n;
    est.trials = trials;
    est.seed = seed;
    est.by_u = run_trials(pl, n, 0, trials, seed, workers);
    return est;
}

AlphaEstimate estimate_alpha_until(const Pipeline& pl, std::size_t n, const std::vector<int>& us,
                                   std::uint64_t min_accepted, std::uint64_t seed, std::uint64_t max_trials,
                                   unsigned workers, std::uint64_t batch) {
    AlphaEstimate est;
    est.n = n;
    est.seed = seed;
    auto done = [&] {
        for (int u : us) {
            auto it = est.by_u.find(u);
            if (it == est.by_u.end() || it->second.accepted < min_accepted) return false;
        }
        return true;
    };
    while (!done()) {
        if (est.trials >= max_trials)
            throw InsufficientConditioning("estimate_alpha_until: fewer than " + std::to_string(min_accepted) +
                                           " accepted draws after " + std::to_string(est.trials) + " trials");
        const std::uint64_t count = std::min(batch, max_trials - est.trials);
        merge_strata(est.by_u, run_trials(pl, n, est.trials, count, seed, workers));
        est.trials += count;
    }
    return est;
}

double FullRankProbe::failure_rate(int n2) const {
    auto d = draws.find(n2);
    if (d == draws.end()) return 0.0;
    auto f = failures.find(n2);
    return ratio(f == failures.end() ? 0 : f->second, d->second);
}

double FullRankProbe::failure_rate_at_least(int from) const {
    std::uint64_t dsum = 0, fsum = 0;
    for (auto [k, v] : draws)
        if (k >= from) dsum += v;
    for (auto [k, v] : failures)
        if (k >= from) fsum += v;
    return ratio(fsum, dsum);
}

namespace {

// Rows of the reduced matrix belonging to bad places or type 1 primes.
f2::BitMatrix upper_block(const f2::BitMatrix& mhat, const TwistData& td) {
    std::vector<std::size_t> rows, cols(mhat.cols());
    std::iota(cols.begin(), cols.end(), std::size_t{0});
    for (std::size_t r = 0; r < mhat.rows(); ++r) {
        const LineLabel l = LineLabel::decode(mhat.row_labels()[r]);
        if (!l.site.twisted || td.types[l.site.index] == PrimeType::Type1) rows.push_back(r);
    }
    return mhat.select(rows, cols);
}

}  // namespace

FullRankProbe fullrank_probe(const Pipeline& pl, std::size_t n, std::uint64_t trials, std::uint64_t seed,
                             unsigned workers) {
    if (trials == 0) throw std::invalid_argument("fullrank_probe: trials must be >= 1");
    using Pair = std::pair<std::map<int, std::uint64_t>, std::map<int, std::uint64_t>>;
    Pair res = chunked_map_reduce<Pair>(
        trials, 1024, workers, Pair{},
        [&](std::uint64_t b, std::uint64_t e) {
            Pair local;
            const CurveContext& ctx = pl.curve();
            for (std::uint64_t t = b; t < e; ++t) {
                CounterRng rng(seed, t);
                const SymbolTable s = sample_symbols(ctx, n, rng);
                const TwistData td = analyze(ctx, s);
                const f2::BitMatrix up = upper_block(pl.build_Mhat_direct(td, s), td);
                ++local.first[td.counts[2]];
                if (f2::left_nullity(up) != 0) ++local.second[td.counts[2]];
            }
            return local;
        },
        [](Pair& acc, Pair part) {
            for (auto [k, v] : part.first) acc.first[k] += v;
            for (auto [k, v] : part.second) acc.second[k] += v;
        });
    FullRankProbe out;
    out.trials = trials;
    out.draws = std::move(res.first);
    out.failures = std::move(res.second);
    return out;
}

double TypeCountProbe::stderr_() const {
    const double p = frequency();
    return trials ? std::sqrt(p * (1 - p) / static_cast<double>(trials)) : 0.0;
}

TypeCountProbe type_count_probe(std::size_t n, std::uint64_t trials, std::uint64_t seed) {
    if (trials == 0) throw std::invalid_argument("type_count_probe: trials must be >= 1");
    TypeCountProbe out;
    out.n = n;
    out.trials = trials;
    const std::size_t need = type_threshold(n);
    for (std::uint64_t t = 0; t < trials; ++t) {
        CounterRng rng(seed, t);
        std::size_t c[4] = {0, 0, 0, 0};
        for (std::size_t i = 0; i < n; ++i) ++c[rng.below(4)];
        if (c[0] >= need && c[1] >= need && c[2] >= need && c[3] >= need) ++out.hits;
    }
    return out;
}

double total_variation(const std::map<int, double>& p, const std::map<int, double>& q) {
    double s = 0;
    for (auto [k, v] : p) {
        auto it = q.find(k);
        s += std::fabs(v - (it == q.end() ? 0.0 : it->second));
    }
    for (auto [k, v] : q)
        if (!p.count(k)) s += std::fabs(v);
    return s / 2;
}

namespace {
std::map<int, double> normalise(const Histogram& h) {
    std::uint64_t total = 0;
    for (auto [k, v] : h) total += v;
    std::map<int, double> out;
    for (auto [k, v] : h) out[k] = ratio(v, total);
    return out;
}
}  // namespace

double BlockReductionProbe::total_variation() const { return model::total_variation(normalise(model), normalise(uniform)); }

BlockReductionProbe block_reduction_probe(const Pipeline& pl, std::size_t n, int u, std::uint64_t trials,
                                          std::uint64_t seed, unsigned workers) {
    if (trials == 0) throw std::invalid_argument("block_reduction_probe: trials must be >= 1");
    BlockReductionProbe res = chunked_map_reduce<BlockReductionProbe>(
        trials, 1024, workers, BlockReductionProbe{},
        [&](std::uint64_t b, std::uint64_t e) {
            BlockReductionProbe local;
            const CurveContext& ctx = pl.curve();
            for (std::uint64_t t = b; t < e; ++t) {
                CounterRng rng(seed, t);
                const SymbolTable s = sample_symbols(ctx, n, rng);
                const TwistData td = analyze(ctx, s);
                if (td.u() != u) continue;
                const f2::BitMatrix mhat = pl.build_Mhat_direct(td, s);
                if (f2::left_nullity(upper_block(mhat, td)) != 0) continue;
                const int n3 = td.counts[3];
                if (n3 - u < 0) continue;
                ++local.accepted;
                ++local.model[static_cast<int>(f2::left_nullity(mhat))];
                CounterRng side = rng.split(1);
                const auto uni = f2::sample_uniform(static_cast<std::size_t>(n3), static_cast<std::size_t>(n3 - u), side);
                ++local.uniform[static_cast<int>(f2::left_nullity(uni))];
            }
            return local;
        },
        [](BlockReductionProbe& acc, BlockReductionProbe part) {
            acc.accepted += part.accepted;
            merge(acc.model, part.model);
            merge(acc.uniform, part.uniform);
        });
    return res;
}

}  // namespace selmer::model
