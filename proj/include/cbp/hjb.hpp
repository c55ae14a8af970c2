#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "cbp/model.hpp"

namespace cbp {

/// Value J*(x, n dt) and policy s*(x, n dt) of the finite-difference HJB
/// recursion. Time is indexed by remaining time: n = 0 is the maintenance
/// moment, n = steps() is the start of the interval.
class SolutionGrid {
 public:
  /// Arrays are n-major: element (x, n) lives at n * (xi + 1) + x.
  SolutionGrid(ProblemInstance inst, double dt, int steps, double action_step, std::vector<double> values,
               std::vector<double> policy);

  const ProblemInstance& instance() const { return inst_; }
  int xi() const { return inst_.xi; }
  int steps() const { return steps_; }
  double dt() const { return dt_; }
  double horizon() const { return steps_ * dt_; }
  /// Spacing of the action grid the solver maximized over.
  double action_step() const { return action_step_; }

  double value(int x, int n) const { return values_[index(x, n)]; }
  double policy(int x, int n) const { return policy_[index(x, n)]; }
  std::span<const double> values_at(int n) const {
    return {values_.data() + static_cast<std::size_t>(n) * width(), width()};
  }
  const std::vector<double>& raw_values() const { return values_; }
  const std::vector<double>& raw_policy() const { return policy_; }

 private:
  std::size_t width() const { return static_cast<std::size_t>(inst_.xi) + 1; }
  std::size_t index(int x, int n) const { return static_cast<std::size_t>(n) * width() + static_cast<std::size_t>(x); }

  ProblemInstance inst_;
  double dt_;
  int steps_;
  double action_step_;
  std::vector<double> values_;
  std::vector<double> policy_;
};

/// Δ(x, n) = J(x, n) - J(x+1, n) and Δ²(x, n) = Δ(x, n) - Δ(x+1, n).
class MarginalGrid {
 public:
  explicit MarginalGrid(const SolutionGrid& sol);

  int xi() const { return xi_; }
  int steps() const { return steps_; }
  double delta(int x, int n) const { return delta_[static_cast<std::size_t>(x) * (steps_ + 1) + n]; }
  double delta2(int x, int n) const { return delta2_[static_cast<std::size_t>(x) * (steps_ + 1) + n]; }

 private:
  int xi_;
  int steps_;
  std::vector<double> delta_;
  std::vector<double> delta2_;
};

/// Replaces ActionSet::Automatic by Full or BangBang using the bang-bang test.
GridConfig resolve_action_set(const ProblemInstance& inst, GridConfig grid);

/// Actions the solver maximizes over for this instance and grid.
std::vector<double> action_grid(const ProblemInstance& inst, const GridConfig& grid);

SolutionGrid solve(const ValidatedInstance& vi);
SolutionGrid solve(const ProblemInstance& inst, const GridConfig& grid);

/// Solves with dt divided by the smallest integer that makes the grid stable.
/// Used where the base rate is sampled rather than configured.
SolutionGrid solve_refined(const ProblemInstance& inst, const GridConfig& grid);

/// Nearest grid index round(t / dt), ties rounding down.
double value_at(const SolutionGrid& sol, int x, double t);
double policy_at(const SolutionGrid& sol, int x, double t);

MarginalGrid marginals(const SolutionGrid& sol);

/// Header `x,n,t_remaining,value,policy`; x-major, n-minor; 9 significant digits.
void write_solution_csv(const SolutionGrid& sol, std::ostream& out);

/// Ties: exact ties at the first step go to the smallest rate. Later, scores
/// within the rounding error accumulated in the value differences count as ties
/// and go to the largest rate among them.
///
/// Reference maximizer: enumerates every action. The production solver uses an
/// upper envelope of the lines r(s) - lambda f(s) d and must agree with this.
SolutionGrid solve_enumerate(const ValidatedInstance& vi);

}  // namespace cbp
