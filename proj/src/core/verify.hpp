#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/sweeps.hpp"

namespace nrc {

// Machine-readable outcome of one named numerical check. `passed` is true
// exactly when every observed metric satisfies its stated comparison;
// negative-control reports use the same flag to mean "the corrupted check
// failed as designed".
struct CheckReport {
  std::string name;
  bool passed = false;
  std::map<std::string, double> observed;
  std::map<std::string, double> bounds;
  std::string config_digest;
  std::int64_t runtime_ms = 0;

  nlohmann::ordered_json to_json() const;
};

// Batch-gradient rank law: 3-layer tanh net, K in {1,2,5}; every layer's
// gradient has numerical rank <= K with sigma_{K+1}/sigma_1 <= 1e-8.
CheckReport check_prop31(std::uint64_t seed);

// Trains a small tanh autoencoder to grad_tol 1e-6 and verifies the
// stationarity identity grad L0 = -2 lambda W within 1e-4 relative.
// lambda = 0 reports not-applicable (the identity needs lambda > 0).
CheckReport check_stationarity(std::uint64_t seed, double lambda = 0.05);

// Centroid-gradient approximation: residual vanishes on degenerate clusters
// and scales linearly with WCSS across a sigma sweep (log-log slope 1 +- 0.3).
// The sampled curvature-constant side is recorded as informational only.
CheckReport check_lemma33(std::uint64_t seed);

// Closed-form minimizer distance bound over a lambda x sigma grid, plus the
// observed sigma-slope and lambda-monotonicity trends (recorded).
CheckReport check_thm53(std::uint64_t seed);

// Rank-constrained minimizer distance bound over a lambda grid with
// clustered labels.
CheckReport check_thm54(std::uint64_t seed);

// Monte Carlo coverage of the Gaussian-mixture TCV bound: class-partition
// WCSS below the bound in at least 95% of trials.
CheckReport check_prop41(std::uint64_t seed, std::size_t trials = 200);

struct RankCollapseOptions {
  std::vector<double> lambda_grid = log_grid(1e-4, 1e-1, 3);
  std::vector<double> sigma_grid = log_grid(0.05, 0.5, 3);
  std::vector<std::uint64_t> seeds = {0, 1};
  AutoencoderCellParams cell;  // grid cells overwrite lambda/sigma/seed
  double low_tail_threshold = 0.05;
  double separation_factor = 5.0;
  double monotone_slack = 1.10;
  std::size_t workers = 2;

  static RankCollapseOptions reduced_default(std::uint64_t seed);
};

// Reduced rank-collapse grid: mean squared tail at rank K small in the
// (lambda max, sigma min) corner, at least `separation_factor` larger in the
// opposite corner, and non-increasing in lambda along each sigma row.
CheckReport check_rank_collapse_trend(std::uint64_t seed,
                                      const RankCollapseOptions& options);
CheckReport check_rank_collapse_trend(std::uint64_t seed);

// Corrupted-bound self-tests; `passed` means the corrupted comparison failed
// as it must. A suite in which these "succeed" is itself broken.
std::vector<CheckReport> negative_controls(std::uint64_t seed, std::size_t trials = 200);

// Every checker once (plus controls when requested), in a deterministic
// order. The heavy rank-collapse grid runs its cells on `workers` threads.
std::vector<CheckReport> run_all_checks(std::uint64_t seed, std::size_t trials,
                                        bool with_negative_controls, std::size_t workers);

// {"reports": [...], "all_passed": bool} with reports in run order.
nlohmann::ordered_json reports_to_json(const std::vector<CheckReport>& reports);

}  // namespace nrc
