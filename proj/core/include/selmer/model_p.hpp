#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "selmer/curve.hpp"
#include "selmer/matrix_pipeline.hpp"
#include "selmer/random.hpp"
#include "selmer/symbols.hpp"

namespace selmer::model {

/// One draw of symbol data for a random squarefree d with n good prime factors:
/// uniform sign, residues uniform in (Z/D)^x, pair symbols uniform subject to
/// reciprocity, lambda uniform on type 1 indices.
SymbolTable sample_symbols(const CurveContext& ctx, std::size_t n, CounterRng& rng);

struct InsufficientConditioning : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Histogram = std::map<int, std::uint64_t>;

/// Rank statistics of the draws whose Tamagawa exponent came out as u.
struct Stratum {
    std::uint64_t accepted = 0;             // draws with exponent u
    std::uint64_t accepted_typed = 0;       // ... that also have every n_i >= n/10
    Histogram ranks;                        // r -> count over accepted
    Histogram ranks_typed;                  // r -> count over accepted_typed

    [[nodiscard]] double frequency(int r) const;
    [[nodiscard]] double frequency_typed(int r) const;
    /// Mean of |Sel_phi|^k = 2^{k r} over accepted draws.
    [[nodiscard]] double moment(int k) const;
};

struct AlphaEstimate {
    std::size_t n = 0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::map<int, Stratum> by_u;

    [[nodiscard]] double acceptance(int u) const;
    /// Throws InsufficientConditioning when no draw landed on u.
    [[nodiscard]] const Stratum& at(int u) const;
};

/// Runs `trials` draws (draw t uses CounterRng(seed, t)) and tabulates the rank
/// from the reduced matrix by exponent u. Rejection sampling: every u is kept.
AlphaEstimate estimate_alpha_n(const Pipeline& pipeline, std::size_t n, std::uint64_t trials, std::uint64_t seed,
                               unsigned workers = 0);

/// Draws until `min_accepted` draws have exponent u for every u in `us`, in
/// batches of `batch`; stops with InsufficientConditioning after `max_trials`.
AlphaEstimate estimate_alpha_until(const Pipeline& pipeline, std::size_t n, const std::vector<int>& us,
                                   std::uint64_t min_accepted, std::uint64_t seed, std::uint64_t max_trials,
                                   unsigned workers = 0, std::uint64_t batch = 50000);

/// Smallest count that satisfies "at least n/10".
inline std::size_t type_threshold(std::size_t n) { return (n + 9) / 10; }

struct FullRankProbe {
    std::uint64_t trials = 0;
    std::map<int, std::uint64_t> draws;     // n_2 -> draws
    std::map<int, std::uint64_t> failures;  // n_2 -> draws where the upper block has a left kernel

    [[nodiscard]] double failure_rate(int n2) const;
    /// Failure rate pooled over n_2 >= from.
    [[nodiscard]] double failure_rate_at_least(int from) const;
};

/// Whether the rows for bad places and type 1 primes of the reduced matrix are independent.
FullRankProbe fullrank_probe(const Pipeline& pipeline, std::size_t n, std::uint64_t trials, std::uint64_t seed,
                             unsigned workers = 0);

struct TypeCountProbe {
    std::size_t n = 0;
    std::uint64_t trials = 0;
    std::uint64_t hits = 0;
    [[nodiscard]] double frequency() const { return trials ? static_cast<double>(hits) / static_cast<double>(trials) : 0; }
    /// Binomial standard error.
    [[nodiscard]] double stderr_() const;
};

/// Frequency with which all four type counts are >= n/10 when types are uniform.
TypeCountProbe type_count_probe(std::size_t n, std::uint64_t trials, std::uint64_t seed);

/// Nullity of the reduced matrix on draws with exponent u and a full-rank upper
/// block, against the nullity of a uniform n_3 x (n_3 - u) matrix drawn alongside.
struct BlockReductionProbe {
    std::uint64_t accepted = 0;
    Histogram model;
    Histogram uniform;
    [[nodiscard]] double total_variation() const;
};

BlockReductionProbe block_reduction_probe(const Pipeline& pipeline, std::size_t n, int u, std::uint64_t trials,
                                          std::uint64_t seed, unsigned workers = 0);

/// 1/2 sum |p - q| over the union of supports.
double total_variation(const std::map<int, double>& p, const std::map<int, double>& q);

}  // namespace selmer::model
