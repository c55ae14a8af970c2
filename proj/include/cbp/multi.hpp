#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "cbp/model.hpp"

namespace cbp {

struct SystemSpec {
  double lambda = 1.0;
  RateFunction f;  ///< power family
};

/// Systems sharing one demand-penalty revenue on their total output. Failure
/// level, action interval and maintenance costs are common.
struct MultiInstance {
  std::vector<SystemSpec> systems;
  int xi = 1;
  double s_max = 1.0;
  CostFunction cost;
  DemandPenaltyRate revenue;
  double horizon = 1.0;
};

double multi_revenue(std::span<const double> rates, const DemandPenaltyRate& rev);

/// 101 actions per system for one system, 41 otherwise.
GridConfig default_multi_grid(const MultiInstance& inst);

/// Joint states are flattened with system 1 varying fastest:
/// id = x1 + (xi+1) x2 + (xi+1)^2 x3.
class MultiSolution {
 public:
  MultiSolution(MultiInstance inst, double dt, int steps, double action_step, std::vector<double> values,
                std::vector<double> policy);

  const MultiInstance& instance() const { return inst_; }
  int systems() const { return static_cast<int>(inst_.systems.size()); }
  int states() const { return states_; }
  int steps() const { return steps_; }
  double dt() const { return dt_; }
  double action_step() const { return action_step_; }

  int state_id(std::span<const int> x) const;
  std::vector<int> state_of(int id) const;

  double value(int id, int n) const { return values_[static_cast<std::size_t>(n) * states_ + id]; }
  double rate(int id, int n, int system) const {
    return policy_[(static_cast<std::size_t>(n) * states_ + id) * systems() + system];
  }
  double value(std::span<const int> x, int n) const { return value(state_id(x), n); }
  double rate(std::span<const int> x, int n, int system) const { return rate(state_id(x), n, system); }

 private:
  MultiInstance inst_;
  double dt_;
  int steps_;
  double action_step_;
  int states_;
  std::vector<double> values_;
  std::vector<double> policy_;
};

/// Validates the instance: 1 <= N <= 3, power-family f_i with f_i(0) = 0,
/// nonnegative bonus and penalty, cost checks shared with the single solver.
/// Throws ActionSpaceTooLarge when n_actions^N > 1e6 and UnstableGrid when
/// dt * sum_i lambda_i f_i(s_max) >= 1.
void validate_multi(const MultiInstance& inst, const GridConfig& grid);

/// Backward recursion over joint states. Every admissible rate vector is
/// scored as revenue - sum_i lambda_i f_i(s_i) (J(x) - J(x + e_i)); failed
/// systems are held at 0. Ties follow the single-system rule, with rate
/// vectors ordered lexicographically (system 1 most significant), so one
/// system reproduces the single solver exactly.
///
/// Two systems with no bonus and convex deterioration take a faster path
/// where both marginal values are nonnegative: the best split of each total
/// output is built greedily, one action step at a time, toward the cheaper
/// system. ActionSet is ignored; the full per-system grid is always used.
MultiSolution solve_multi(const MultiInstance& inst, const GridConfig& grid);

/// Same recursion with plain enumeration everywhere.
MultiSolution solve_multi_enumerate(const MultiInstance& inst, const GridConfig& grid);

/// Header `x1,x2,n,value,s1,s2` (one x and s column per system).
void write_multi_csv(const MultiSolution& sol, std::ostream& out);

}  // namespace cbp
