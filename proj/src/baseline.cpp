#include "cbp/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "cbp/golden.hpp"
#include "cbp/hjb.hpp"

namespace cbp {

namespace {

double log_poisson_term(int j, double m) { return -m + j * std::log(m) - std::lgamma(j + 1.0); }

}  // namespace

double erlang_cdf(int k, double mu, double t) {
  if (k < 1) throw Error(Errc::InvalidInstance, "Erlang shape must be >= 1");
  if (!(mu > 0.0) || !(t >= 0.0)) throw Error(Errc::InvalidInstance, "Erlang rate must be > 0 and time >= 0");
  const double m = mu * t;
  if (m == 0.0) return 0.0;
  if (m < k) {
    // Upper Poisson tail P[N >= k]; terms fall off geometrically past k.
    double sum = 0.0;
    for (int j = k;; ++j) {
      const double term = std::exp(log_poisson_term(j, m));
      sum += term;
      if (term <= sum * 1e-17 || j > k + 10000) break;
    }
    return std::min(sum, 1.0);
  }
  double head = 0.0;
  for (int j = 0; j < k; ++j) head += std::exp(log_poisson_term(j, m));
  return std::clamp(1.0 - head, 0.0, 1.0);
}

double expected_min_erlang(int k, double mu, double t) {
  if (t == 0.0) return 0.0;
  double sum = 0.0;
  for (int j = 1; j <= k; ++j) sum += erlang_cdf(j, mu, t);
  return std::min(sum / mu, t);
}

double power_exponent(const RateFunction& fn) {
  if (const auto* p = fn.as_power()) return p->exponent;
  return std::numeric_limits<double>::quiet_NaN();
}

namespace {

void require_two_level(const ProblemInstance& inst) {
  if (!inst.cost.is_two_level()) {
    throw Error(Errc::InvalidInstance, "fixed-rate baseline needs a two-level cost (cp below failure, cu at failure)");
  }
}

}  // namespace

FixedRateResult fixed_rate_outcome(const ProblemInstance& inst, double s, double horizon) {
  require_two_level(inst);
  const double tol = 1e-12 * std::max(1.0, inst.s_max);
  if (!(s >= -tol) || s > inst.s_max + tol) {
    throw Error(Errc::RateOutOfRange, fmt::format("rate {} outside [0, {}]", s, inst.s_max));
  }
  s = std::clamp(s, 0.0, inst.s_max);
  const double cp = inst.cost.preventive();
  const double cu = inst.cost.corrective();
  FixedRateResult out;
  out.s_star = s;
  const double mu = inst.lambda * eval_rate(inst.f, s);
  if (s == 0.0 || mu == 0.0) {
    out.expected_runtime = horizon;
    out.expected_profit = eval_rate(inst.r, s) * horizon - cp;
    return out;
  }
  out.p_failure = erlang_cdf(inst.xi, mu, horizon);
  out.expected_runtime = expected_min_erlang(inst.xi, mu, horizon);
  out.expected_profit = eval_rate(inst.r, s) * out.expected_runtime - cp - (cu - cp) * out.p_failure;
  return out;
}

double fixed_rate_profit(const ProblemInstance& inst, double s, double horizon) {
  return fixed_rate_outcome(inst, s, horizon).expected_profit;
}

FixedRateResult optimize_fixed_rate(const ProblemInstance& inst, double horizon, int n_actions) {
  require_two_level(inst);
  if (n_actions < 2) throw Error(Errc::InvalidInstance, "n_actions must be >= 2");
  std::vector<double> grid(static_cast<std::size_t>(n_actions));
  for (int k = 0; k < n_actions; ++k) grid[k] = inst.s_max * k / (n_actions - 1);
  grid.back() = inst.s_max;

  int best = 0;
  double best_v = fixed_rate_profit(inst, grid[0], horizon);
  for (int k = 1; k < n_actions; ++k) {
    const double v = fixed_rate_profit(inst, grid[k], horizon);
    if (v > best_v) {
      best = k;
      best_v = v;
    }
  }
  const double lo = grid[std::max(best - 1, 0)];
  const double hi = grid[std::min(best + 1, n_actions - 1)];
  const auto [s_ref, neg_v] = golden_min(lo, hi, 1e-10 * std::max(1.0, inst.s_max),
                                         [&](double s) { return -fixed_rate_profit(inst, s, horizon); });
  const double s_star = -neg_v > best_v ? s_ref : grid[best];
  return fixed_rate_outcome(inst, s_star, horizon);
}

BaselineComparison compare_with_fixed_rate(const ProblemInstance& inst, const GridConfig& grid) {
  BaselineComparison cmp;
  const auto sol = solve(inst, grid);
  cmp.p_cs = sol.value(0, sol.steps());
  cmp.fixed = optimize_fixed_rate(inst, inst.horizon, grid.n_actions);
  const double p_fs = cmp.fixed.expected_profit;
  if (std::abs(p_fs) < 1e-9) {
    throw Error(Errc::DegenerateBaseline, fmt::format("fixed-rate profit {} is zero; relative value undefined", p_fs));
  }
  cmp.r_percent = 100.0 * (cmp.p_cs - p_fs) / p_fs;
  return cmp;
}

double relative_value(const ProblemInstance& inst, double horizon, const GridConfig& grid) {
  return compare_with_fixed_rate(inst.with_horizon(horizon), grid).r_percent;
}

void write_baseline_header(std::ostream& out) { out << "lambda,xi,cp,cu,T,gamma,nu,s_star,p_fs,p_cs,R\n"; }

void write_baseline_row(const ProblemInstance& inst, const BaselineComparison& cmp, std::ostream& out) {
  out << fmt::format("{:.9g},{},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g}\n", inst.lambda, inst.xi,
                     inst.cost.preventive(), inst.cost.corrective(), inst.horizon, power_exponent(inst.f),
                     power_exponent(inst.r), cmp.fixed.s_star, cmp.fixed.expected_profit, cmp.p_cs, cmp.r_percent);
}

}  // namespace cbp
