#pragma once

#include <random>

#include "cbp/model.hpp"

namespace fixtures {

using cbp::CostFunction;
using cbp::ProblemInstance;
using cbp::RateFunction;

// lambda = 1, xi = 10, cp = 1, cu = 5, r = s^0.5, f = s^2, s in [0, 1].
inline ProblemInstance concave_revenue(double lambda = 1.0, double horizon = 15.0) {
  ProblemInstance inst;
  inst.lambda = lambda;
  inst.xi = 10;
  inst.s_max = 1.0;
  inst.f = RateFunction::power(1.0, 2.0);
  inst.r = RateFunction::power(1.0, 0.5);
  inst.cost = CostFunction::two_level(10, 1.0, 5.0);
  inst.horizon = horizon;
  return inst;
}

// Same shape with revenue and deterioration swapped: bang-bang optimal.
inline ProblemInstance convex_revenue(double lambda = 1.0, double horizon = 15.0) {
  ProblemInstance inst = concave_revenue(lambda, horizon);
  inst.f = RateFunction::power(1.0, 0.5);
  inst.r = RateFunction::power(1.0, 2.0);
  return inst;
}

// cp = 40, cu = 50 with convex revenue: average profit negative for every T.
inline ProblemInstance costly_maintenance(double horizon = 15.0) {
  ProblemInstance inst = convex_revenue(1.0, horizon);
  inst.cost = CostFunction::two_level(10, 40.0, 50.0);
  return inst;
}

// lambda = 1, xi = 14, cp = 2, cu = 10, f = s^gamma, r = s^nu, s in [0, 2], T = 10.
inline ProblemInstance base_case(double lambda = 1.0, int xi = 14, double gamma = 1.0, double nu = 1.0,
                                 double horizon = 10.0) {
  ProblemInstance inst;
  inst.lambda = lambda;
  inst.xi = xi;
  inst.s_max = 2.0;
  inst.f = RateFunction::power(1.0, gamma);
  inst.r = RateFunction::power(1.0, nu);
  inst.cost = CostFunction::two_level(xi, 2.0, 10.0);
  inst.horizon = horizon;
  return inst;
}

// Random valid power-family instance with a convex cost vector.
inline ProblemInstance random_instance(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double exps[] = {0.5, 0.75, 1.0, 1.33, 2.0};
  ProblemInstance inst;
  inst.lambda = 0.5 + u(rng);
  inst.xi = 3 + static_cast<int>(u(rng) * 6);
  inst.s_max = 0.5 + 1.5 * u(rng);
  inst.f = RateFunction::power(0.5 + u(rng), exps[static_cast<int>(u(rng) * 5)]);
  inst.r = RateFunction::power(0.5 + u(rng), exps[static_cast<int>(u(rng) * 5)]);
  std::vector<double> costs(static_cast<std::size_t>(inst.xi) + 1);
  double level = 0.5 + 2.0 * u(rng);
  double slope = 0.2 * u(rng);
  for (auto& c : costs) {
    c = level;
    level += slope;
    slope += 0.3 * u(rng);
  }
  costs.back() += 5.0 * u(rng);
  inst.cost = CostFunction(costs);
  inst.horizon = 2.0 + 6.0 * u(rng);
  return inst;
}

inline cbp::GridConfig grid(double dt = 0.005, int n_actions = 101,
                            cbp::ActionSet set = cbp::ActionSet::Automatic) {
  return cbp::GridConfig{dt, n_actions, set};
}

}  // namespace fixtures
