#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cbp/model.hpp"

namespace cbp {

struct IntervalBounds {
  double t_min = 0.0;
  double t_max = 0.0;
};

/// [10 dt, 10 xi / lambda].
IntervalBounds default_interval_bounds(const ProblemInstance& inst, const GridConfig& grid);

struct CurvePoint {
  double horizon;
  double g;
};

struct IntervalResult {
  double t_star = 0.0;
  double g_star = 0.0;
  bool boundary_hit = false;
  std::optional<std::string> warning;  ///< set when boundary_hit
  std::vector<CurvePoint> curve;       ///< g(T) sampled across the bounds
};

/// g(T) = J*(0, T) / T with J* solved on the given grid.
double average_profit(const ProblemInstance& inst, double horizon, const GridConfig& grid);

/// Golden-section search for the interval length that maximizes g on the
/// dt-grid inside the bounds. A maximizer within 2 dt of a bound is reported
/// with boundary_hit and a warning rather than an error.
///
/// J*(0, t) does not depend on the horizon the recursion was started for, so
/// one solve up to t_max serves every probe. curve_step sets the spacing of
/// the returned curve (0 picks about 0.1 time units, never finer than dt).
IntervalResult optimize_interval(const ProblemInstance& inst, IntervalBounds bounds, const GridConfig& grid,
                                 double curve_step = 0.0);

/// (cp + (cu - cp) P[T_xi <= t]) / E[min(T_xi, t)] with T_xi ~ Erlang(xi, lambda).
double maintenance_cost_rate(double lambda, int xi, double cp, double cu, double t);

struct SequentialResult {
  double t_star = 0.0;
  double rate = 0.0;
  bool boundary_hit = false;
};

/// Age-based interval minimizing maintenance_cost_rate over the bounds.
/// Throws InvalidCosts when cp >= cu.
SequentialResult sequential_interval(double lambda, int xi, double cp, double cu, IntervalBounds bounds);

struct IntervalComparison {
  double r_hat = 0.0;  ///< percent
  double t_integrated = 0.0;
  double t_sequential = 0.0;
  double p_integrated = 0.0;
  double p_sequential = 0.0;
  bool integrated_boundary = false;
  bool sequential_boundary = false;
};

/// Integrated interval (optimize_interval) against the age-based interval,
/// both run with the condition-based policy. Needs a two-level cost.
IntervalComparison compare_integrated_sequential(const ProblemInstance& inst, IntervalBounds bounds,
                                                 const GridConfig& grid);

/// Header `T,g`.
void write_curve_csv(const IntervalResult& result, std::ostream& out);

}  // namespace cbp
