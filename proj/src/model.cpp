#include "cbp/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cbp {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidInstance: return "InvalidInstance";
    case Errc::NonIncreasingCost: return "NonIncreasingCost";
    case Errc::NonConvexCost: return "NonConvexCost";
    case Errc::DeteriorationNotZeroAtOff: return "DeteriorationNotZeroAtOff";
    case Errc::DecreasingRevenue: return "DecreasingRevenue";
    case Errc::UnstableGrid: return "UnstableGrid";
    case Errc::EmptyHorizon: return "EmptyHorizon";
    case Errc::NegativeRateInput: return "NegativeRateInput";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::NotBangBangSolution: return "NotBangBangSolution";
    case Errc::IncompatibleGrids: return "IncompatibleGrids";
    case Errc::InvalidCosts: return "InvalidCosts";
    case Errc::RateOutOfRange: return "RateOutOfRange";
    case Errc::DegenerateBaseline: return "DegenerateBaseline";
    case Errc::EnvelopeViolated: return "EnvelopeViolated";
    case Errc::NonPositiveOracleMean: return "NonPositiveOracleMean";
    case Errc::ActionSpaceTooLarge: return "ActionSpaceTooLarge";
    case Errc::ConfigError: return "ConfigError";
    case Errc::NoInteriorMaximizer: return "NoInteriorMaximizer";
  }
  return "Unknown";
}

double RateFunction::operator()(double s) const {
  if (!(s >= 0.0)) throw Error(Errc::NegativeRateInput, "rate function evaluated at s = " + std::to_string(s));
  if (const auto* p = as_power()) {
    if (s == 0.0) return 0.0;
    return p->coeff * std::pow(s, p->exponent);
  }
  return demand_penalty_value(*as_demand_penalty(), s);
}

double eval_rate(const RateFunction& fn, double s) { return fn(s); }

CostFunction CostFunction::two_level(int xi, double cp, double cu) {
  if (xi < 1) throw Error(Errc::InvalidInstance, "failure level must be >= 1");
  std::vector<double> costs(static_cast<std::size_t>(xi) + 1, cp);
  costs.back() = cu;
  return CostFunction(std::move(costs));
}

bool CostFunction::is_two_level() const {
  if (costs_.size() < 2) return false;
  return std::all_of(costs_.begin(), costs_.end() - 1, [&](double c) { return c == costs_.front(); });
}

int horizon_steps(double horizon, double dt) { return static_cast<int>(std::lround(horizon / dt)); }

GridConfig default_grid(const ProblemInstance& inst) {
  GridConfig grid;
  const double rate = inst.lambda * eval_rate(inst.f, inst.s_max);
  if (rate > 0.0) grid.dt = std::min(0.005, 0.5 / rate);
  return grid;
}

int stability_refinement(double dt, double rate_bound) {
  int m = 1;
  while ((dt / m) * rate_bound >= 1.0) ++m;
  return m;
}

void validate_cost(const CostFunction& cost, int xi) {
  const auto& c = cost.costs();
  if (static_cast<int>(c.size()) != xi + 1) {
    throw Error(Errc::InvalidInstance, "cost vector has " + std::to_string(c.size()) + " entries, expected xi+1 = " +
                                           std::to_string(xi + 1));
  }
  double scale = 1.0;
  for (double v : c) {
    if (!std::isfinite(v) || v < 0.0) throw Error(Errc::InvalidInstance, "maintenance costs must be finite and >= 0");
    scale = std::max(scale, std::abs(v));
  }
  const double tol = 1e-12 * scale;
  for (int x = 0; x < xi; ++x) {
    if (c[x + 1] < c[x] - tol) {
      throw Error(Errc::NonIncreasingCost, "c_m(" + std::to_string(x + 1) + ") < c_m(" + std::to_string(x) + ")");
    }
  }
  for (int x = 0; x + 1 < xi; ++x) {
    if ((c[x + 2] - c[x + 1]) < (c[x + 1] - c[x]) - tol) {
      throw Error(Errc::NonConvexCost, "second difference of c_m negative at x = " + std::to_string(x + 1));
    }
  }
}

void validate_deterioration(const RateFunction& f) {
  const auto* p = f.as_power();
  if (p == nullptr) {
    throw Error(Errc::DeteriorationNotZeroAtOff, "deterioration must be a power function so that f(0) = 0");
  }
  if (!(p->coeff > 0.0) || !(p->exponent > 0.0) || !std::isfinite(p->coeff) || !std::isfinite(p->exponent)) {
    throw Error(Errc::DeteriorationNotZeroAtOff, "deterioration power needs coeff > 0 and exponent > 0");
  }
}

void validate_revenue(const RateFunction& r) {
  if (const auto* p = r.as_power()) {
    if (!(p->coeff > 0.0) || !(p->exponent > 0.0) || !std::isfinite(p->coeff) || !std::isfinite(p->exponent)) {
      throw Error(Errc::DecreasingRevenue, "revenue power needs coeff > 0 and exponent > 0");
    }
    return;
  }
  const auto* d = r.as_demand_penalty();
  if (!(d->bonus >= 0.0) || !(d->penalty >= 0.0)) {
    throw Error(Errc::DecreasingRevenue, "demand-penalty revenue needs bonus >= 0 and penalty >= 0");
  }
  if (!(d->demand > 0.0)) throw Error(Errc::InvalidInstance, "demand rate must be positive");
}

ValidatedInstance validate_instance(const ProblemInstance& inst, const GridConfig& grid) {
  if (!(inst.lambda > 0.0) || !std::isfinite(inst.lambda)) throw Error(Errc::InvalidInstance, "lambda must be > 0");
  if (inst.xi < 1) throw Error(Errc::InvalidInstance, "xi must be >= 1");
  if (!(inst.s_max > 0.0) || !std::isfinite(inst.s_max)) throw Error(Errc::InvalidInstance, "s_max must be > 0");
  if (grid.n_actions < 2) throw Error(Errc::InvalidInstance, "n_actions must be >= 2");
  validate_cost(inst.cost, inst.xi);
  validate_deterioration(inst.f);
  validate_revenue(inst.r);
  if (!(inst.horizon > 0.0)) throw Error(Errc::EmptyHorizon, "horizon T must be > 0");
  if (!(grid.dt > 0.0)) throw Error(Errc::InvalidInstance, "dt must be > 0");
  const double rate_bound = inst.lambda * eval_rate(inst.f, inst.s_max);
  if (grid.dt * rate_bound >= 1.0) {
    throw Error(Errc::UnstableGrid, "dt * lambda * f(s_max) = " + std::to_string(grid.dt * rate_bound) + " >= 1");
  }
  const int steps = horizon_steps(inst.horizon, grid.dt);
  if (grid.dt > inst.horizon * (1.0 + 1e-12) || steps < 1) {
    throw Error(Errc::EmptyHorizon, "dt exceeds the horizon");
  }
  return ValidatedInstance(inst, grid, steps);
}

}  // namespace cbp
