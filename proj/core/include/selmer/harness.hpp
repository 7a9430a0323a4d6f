#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "selmer/arithmetic.hpp"
#include "selmer/curve.hpp"
#include "selmer/matrix_pipeline.hpp"

namespace selmer::harness {

enum class SweepMode { Coprime, Full };

std::string to_string(SweepMode m);
/// "coprime" or "full"; throws std::invalid_argument otherwise.
SweepMode parse_mode(const std::string& s);

struct TwistRecord {
    arith::i64 d = 1;
    /// Types of the primes of d prime to the bad primes, ascending.
    std::vector<PrimeType> prime_types;
    std::array<int, 5> n{};  // n[t] = number of type t primes
    int u = 0;
    std::optional<unsigned> r_matrix;  // coprime mode only
    unsigned r_oracle = 0;
    unsigned r_phihat = 0;
    int c_d = 0;
    /// Positive part of gcd(d, bad primes); 1 in coprime mode.
    arith::u64 m = 1;
    /// Full mode, m > 1: whether the twist E^m could be built and gave the same rank at d/m.
    std::optional<bool> m_twist_agrees;
    /// The six membership conditions for the set with this record's u:
    /// 0 < d <= X, squarefree, coprime to the bad primes, exponent u,
    /// |omega(d) - log log X| < (log log X)^(5/8), and every type count > omega(d)/10.
    std::array<bool, 6> s_prime{};
    int omega = 0;  // distinct primes of d

    [[nodiscard]] bool in_s_prime() const noexcept;
    [[nodiscard]] bool in_s_double_prime() const noexcept;
};

/// Conditions 5 and 6 above; natural logarithms, strict inequalities.
bool omega_window(int omega, arith::u64 X);
bool enough_of_each_type(const std::array<int, 5>& n, int omega);

using RankHistogram = std::map<int, std::uint64_t>;

/// Histograms of dim Sel_phi by exponent u over one subset of the records.
struct Stratum {
    std::string name;
    std::map<int, RankHistogram> by_u;
    [[nodiscard]] std::uint64_t total(int u) const;
    [[nodiscard]] std::uint64_t total() const;
};

struct AlphaRow {
    int u = 0;
    int r = 0;
    std::uint64_t count = 0;
    double frequency = 0;
    double alpha = 0;
    double diff = 0;  // frequency - alpha
};

struct MomentRow {
    int k = 0;
    int u = 0;
    std::uint64_t count = 0;
    double empirical = 0;  // mean of 2^{k r}
    double predicted = 0;  // sum_r 2^{k r} alpha(r, u)
    double divergence = 0; // empirical / predicted - 1
};

struct MomentTable {
    std::string stratum;
    std::vector<MomentRow> rows;
    std::vector<std::string> notes;  // one per omitted u
};

struct SweepReport {
    static constexpr int kSchemaVersion = 1;

    arith::i64 A = 0, B = 0;
    arith::u64 X = 0;
    SweepMode mode = SweepMode::Coprime;
    std::vector<TwistRecord> records;  // ordered by |d|, +d before -d

    /// "all" (every record), "positive" (d > 0), "s_double_prime", "s_prime".
    std::vector<Stratum> strata;

    std::uint64_t matrix_mismatches = 0;   // r_matrix != r_oracle
    std::uint64_t tamagawa_mismatches = 0; // u != c_d + n3 - n2
    std::uint64_t support_violations = 0;  // r < max(1, u + 1)
    std::uint64_t m_twist_mismatches = 0;
    std::uint64_t m_twist_skipped = 0;     // E^m rejected (too large)

    [[nodiscard]] const Stratum& stratum(const std::string& name) const;
};

/// One record per squarefree d with 0 < |d| <= X (coprime mode: d prime to the
/// bad primes, both the matrix and the oracle; full mode: every squarefree d,
/// oracle only, with gcd(d, bad) folded into the twist E^m as a cross-check).
/// Deterministic for any worker count.
SweepReport sweep(const CurveContext& ctx, arith::u64 X, SweepMode mode, unsigned workers = 0);

/// Frequencies against alpha(r, u) for every u in the stratum, r from 0 to
/// max(r_max, largest r seen).
std::vector<AlphaRow> alpha_rows(const Stratum& s, int r_max = 8);

/// k = 0..k_max (k_max <= 4, else std::invalid_argument). Empty strata give notes.
MomentTable moment_report(const SweepReport& report, int k_max, const std::string& stratum = "s_prime");

struct Check {
    std::string name;
    std::uint64_t tested = 0;
    std::uint64_t failures = 0;
    std::optional<arith::i64> first_failure;
    std::string detail;
    [[nodiscard]] bool passed() const noexcept { return failures == 0; }
};

struct VerifySummary {
    arith::i64 A = 0, B = 0;
    arith::u64 X = 0;
    std::vector<Check> checks;
    [[nodiscard]] bool passed() const noexcept;
};

/// Cross-checks on every coprime squarefree d with |d| <= X: oracle equivalence,
/// Tamagawa identity, local duality, row/column count, surviving labels,
/// surgery against the direct build, right nullvector, bad-place block locality
/// (up to `pairs` pairs), and that a flipped symbol is noticed somewhere.
VerifySummary verify(const CurveContext& ctx, arith::u64 X, unsigned workers = 0, std::size_t pairs = 50);

}  // namespace selmer::harness
