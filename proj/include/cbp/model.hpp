#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "cbp/error.hpp"

namespace cbp {

/// value(s) = coeff * s^exponent
struct PowerRate {
  double coeff = 1.0;
  double exponent = 1.0;

  bool operator==(const PowerRate&) const = default;
};

/// value(s) = bonus * (s - demand)^+ - penalty * (demand - s)^+
struct DemandPenaltyRate {
  double bonus = 0.0;
  double penalty = 1.0;
  double demand = 1.0;

  bool operator==(const DemandPenaltyRate&) const = default;
};

/// Production-rate dependent function used both for deterioration (f) and
/// revenue (r).
class RateFunction {
 public:
  RateFunction() = default;
  RateFunction(PowerRate p) : spec_(p) {}
  RateFunction(DemandPenaltyRate d) : spec_(d) {}

  static RateFunction power(double coeff, double exponent) { return PowerRate{coeff, exponent}; }
  static RateFunction demand_penalty(double bonus, double penalty, double demand) {
    return DemandPenaltyRate{bonus, penalty, demand};
  }

  bool is_power() const { return std::holds_alternative<PowerRate>(spec_); }
  const PowerRate* as_power() const { return std::get_if<PowerRate>(&spec_); }
  const DemandPenaltyRate* as_demand_penalty() const { return std::get_if<DemandPenaltyRate>(&spec_); }

  /// Throws NegativeRateInput for s < 0.
  double operator()(double s) const;

  bool operator==(const RateFunction&) const = default;

 private:
  std::variant<PowerRate, DemandPenaltyRate> spec_{PowerRate{}};
};

double eval_rate(const RateFunction& fn, double s);

/// Demand-penalty revenue for a total production rate. Shared by the single
/// and multi-system solvers so both evaluate identical arithmetic.
inline double demand_penalty_value(const DemandPenaltyRate& d, double total_rate) {
  const double surplus = total_rate - d.demand > 0.0 ? total_rate - d.demand : 0.0;
  const double shortfall = d.demand - total_rate > 0.0 ? d.demand - total_rate : 0.0;
  return d.bonus * surplus - d.penalty * shortfall;
}

/// Maintenance cost c_m(x) for x in {0, ..., xi}.
class CostFunction {
 public:
  CostFunction() = default;
  explicit CostFunction(std::vector<double> costs) : costs_(std::move(costs)) {}

  /// c_m(x) = cp for x < xi, cu at the failure level.
  static CostFunction two_level(int xi, double cp, double cu);

  double operator()(int x) const { return costs_.at(static_cast<std::size_t>(x)); }
  const std::vector<double>& costs() const { return costs_; }
  int failure_level() const { return static_cast<int>(costs_.size()) - 1; }

  /// True when costs take a single value below the failure level.
  bool is_two_level() const;
  double preventive() const { return costs_.front(); }
  double corrective() const { return costs_.back(); }

 private:
  std::vector<double> costs_;
};

struct ProblemInstance {
  double lambda = 1.0;  ///< base rate: shocks per time unit when f(s) = 1
  int xi = 1;           ///< failure level
  double s_max = 1.0;   ///< upper end of the action interval [0, s_max]
  RateFunction f;       ///< deterioration
  RateFunction r;       ///< revenue
  CostFunction cost;
  double horizon = 1.0;  ///< time between planned maintenance moments

  ProblemInstance with_lambda(double l) const {
    ProblemInstance copy = *this;
    copy.lambda = l;
    return copy;
  }
  ProblemInstance with_horizon(double t) const {
    ProblemInstance copy = *this;
    copy.horizon = t;
    return copy;
  }
};

enum class ActionSet {
  Automatic,  ///< {0, s_max} when the bang-bang test passes, full grid otherwise
  Full,       ///< uniform n_actions-point grid on [0, s_max]
  BangBang,   ///< {0, s_max}
};

struct GridConfig {
  double dt = 0.005;
  int n_actions = 101;
  ActionSet action_set = ActionSet::Automatic;
};

/// min(0.005, half the stability bound 1 / (lambda f(s_max))).
GridConfig default_grid(const ProblemInstance& inst);

/// Number of time steps for a horizon: round(horizon / dt).
int horizon_steps(double horizon, double dt);

/// Instance + grid that passed every invariant check. Only produced by
/// validate_instance.
class ValidatedInstance {
 public:
  const ProblemInstance& instance() const { return inst_; }
  const GridConfig& grid() const { return grid_; }
  int steps() const { return steps_; }

 private:
  friend ValidatedInstance validate_instance(const ProblemInstance&, const GridConfig&);
  ValidatedInstance(ProblemInstance inst, GridConfig grid, int steps)
      : inst_(std::move(inst)), grid_(grid), steps_(steps) {}

  ProblemInstance inst_;
  GridConfig grid_;
  int steps_;
};

ValidatedInstance validate_instance(const ProblemInstance& inst, const GridConfig& grid);

/// Checks shared by the single- and multi-system validators.
void validate_cost(const CostFunction& cost, int xi);
void validate_deterioration(const RateFunction& f);
void validate_revenue(const RateFunction& r);

/// Smallest integer refinement m >= 1 such that (dt / m) * rate_bound < 1.
int stability_refinement(double dt, double rate_bound);

}  // namespace cbp
