#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cbp/bayes.hpp"
#include "cbp/hjb.hpp"
#include "cbp/rng.hpp"

namespace cbp {

struct ShockEvent {
  double time;  ///< elapsed time since the interval started
  int level;    ///< deterioration level after the shock
};

/// One controlled deterioration path over [0, T]. The rate is set at the start
/// of every dt cell from the current level and held for the cell, except that
/// a failure switches the system off at once.
struct Trajectory {
  std::vector<ShockEvent> events;
  std::vector<double> applied_rate;  ///< rate chosen at the start of each cell
  int final_level = 0;
  double revenue = 0.0;
  double maintenance_cost = 0.0;
  double profit = 0.0;
  UsageIntegral usage;
};

/// Trajectory under an optimal policy solved for some base rate, with shocks
/// drawn by thinning at the true base rate. Cell k (elapsed) uses the policy
/// row for remaining index steps() - k.
Trajectory simulate_path(const SolutionGrid& policy, double true_lambda, SplitMix64& rng);
Trajectory simulate_path(const SolutionGrid& policy, double true_lambda, std::uint64_t seed);

/// Constant rate s until failure or the horizon.
Trajectory simulate_static(const ProblemInstance& inst, double s, double horizon, double dt, SplitMix64& rng);

/// Base rate estimates used by a CE path, one per phase.
struct CETrace {
  std::vector<double> lambda_hat;
  std::vector<int> epoch_cells;      ///< first cell of each later phase
  std::vector<int> level_at_epoch;
  std::vector<double> usage_at_epoch;
};

/// Certainty-equivalent path: the policy is re-solved at the posterior mean at
/// every epoch of ce_schedule(T, n_opt) and read at the true remaining time.
/// inst.lambda is ignored. Grids that the estimate makes unstable are refined.
Trajectory simulate_ce(const ProblemInstance& inst, const GammaPrior& prior, double true_lambda, int n_opt,
                       const GridConfig& grid, SplitMix64& rng, CETrace* trace = nullptr);

enum class OracleMode {
  Analytic,   ///< J*_{lambda*}(0, T) from the solver
  Simulated,  ///< one path under the lambda*-optimal policy, on the CE path's stream
};

struct RegretConfig {
  ProblemInstance inst;  ///< lambda ignored
  GammaPrior prior;
  int n_opt = 0;
  int reps = 2000;
  GridConfig grid;
  OracleMode oracle = OracleMode::Analytic;
  /// Doubles reps (up to 1e5) until both profit means have a 95% CI narrower
  /// than 0.1% of their value.
  bool escalate = false;
};

struct ReplicationRecord {
  int rep;
  double lambda_star;
  double oracle_value;
  double ce_profit;
};

struct RegretEstimate {
  double mean_regret = 0.0;   ///< percent
  double ci_halfwidth = 0.0;  ///< percent, 95%
  int reps = 0;
  double oracle_mean = 0.0;
  double ce_mean = 0.0;
  double oracle_halfwidth = 0.0;
  double ce_halfwidth = 0.0;
  bool ci_target_met = false;
  std::vector<ReplicationRecord> records;
};

/// Per replication: draw lambda* from the prior (substream lane 0), take the
/// oracle value, run one CE path (lane 1). Regret is 100 (O - CE) / O on the
/// means, with a delta-method interval on the ratio. Throws
/// NonPositiveOracleMean when the oracle mean is not positive.
RegretEstimate estimate_regret(const RegretConfig& config, std::uint64_t seed);

/// Inverse-CDF draw from the prior.
double draw_base_rate(const GammaPrior& prior, SplitMix64& rng);

/// Header `rep,lambda_star,oracle_value,ce_profit`.
void write_replications_csv(const RegretEstimate& est, std::ostream& out);

}  // namespace cbp
