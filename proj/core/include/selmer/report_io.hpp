#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "selmer/bit_matrix.hpp"
#include "selmer/harness.hpp"
#include "selmer/model_p.hpp"

namespace selmer::report {

inline constexpr int kSchemaVersion = 1;

// All writers produce JSON with sorted keys and no timing fields, so the same
// inputs give the same bytes.

std::string sweep_json(const harness::SweepReport& rep, bool include_records = false, int k_max = 4);
std::string verify_json(const harness::VerifySummary& sum);
/// Acceptance, rank frequencies (plain and type-conditioned) and alpha(r, u) for each u in `us`.
std::string simulate_json(const CurveContext& ctx, const model::AlphaEstimate& est, const std::vector<int>& us,
                          int r_max = 12);
/// Nullity frequencies against alpha_prime(2, cols - rows, r).
std::string randmat_json(const f2::NullityHistogram& h, std::uint64_t seed);
std::string constants_json(int u, int r_max, std::uint64_t p);

/// One file per u, "<stratum>_u<u>.csv", header r,count,frequency,alpha_ru,diff.
/// Returns the paths written; creates `dir` if needed.
std::vector<std::filesystem::path> write_sweep_csv(const harness::SweepReport& rep, const std::filesystem::path& dir,
                                                   const std::string& stratum = "all");

}  // namespace selmer::report
