#pragma once

#include <iosfwd>
#include <vector>

#include "cbp/model.hpp"

namespace cbp {

/// P[Erlang(k, mu) <= t].
double erlang_cdf(int k, double mu, double t);

/// E[min(Erlang(k, mu), t)] = (1/mu) * sum_{j=1..k} erlang_cdf(j, mu, t).
double expected_min_erlang(int k, double mu, double t);

struct FixedRateResult {
  double s_star = 0.0;
  double expected_profit = 0.0;
  double p_failure = 0.0;         ///< P[T_xi <= T]
  double expected_runtime = 0.0;  ///< E[min(T_xi, T)]
};

/// Expected profit of producing at constant rate s for T time units, with the
/// system stopping at failure: r(s) E[min(T_xi, T)] - cp - (cu - cp) P[T_xi <= T].
/// Needs a two-level cost function.
FixedRateResult fixed_rate_outcome(const ProblemInstance& inst, double s, double horizon);
double fixed_rate_profit(const ProblemInstance& inst, double s, double horizon);

/// Best constant rate: scan of the n_actions-point grid, then a golden-section
/// refinement inside the bracket around the best grid point.
FixedRateResult optimize_fixed_rate(const ProblemInstance& inst, double horizon, int n_actions = 101);

struct BaselineComparison {
  FixedRateResult fixed;
  double p_cs = 0.0;      ///< J*(0, T) of the condition-based policy
  double r_percent = 0.0;
};

/// Relative gain of the condition-based policy over the best fixed rate, in
/// percent. Throws DegenerateBaseline when |P_FS| < 1e-9.
BaselineComparison compare_with_fixed_rate(const ProblemInstance& inst, const GridConfig& grid);
double relative_value(const ProblemInstance& inst, double horizon, const GridConfig& grid);

/// Exponents of power-family f and r, or NaN for other families.
double power_exponent(const RateFunction& fn);

void write_baseline_header(std::ostream& out);
/// Row `lambda,xi,cp,cu,T,gamma,nu,s_star,p_fs,p_cs,R`.
void write_baseline_row(const ProblemInstance& inst, const BaselineComparison& cmp, std::ostream& out);

}  // namespace cbp
