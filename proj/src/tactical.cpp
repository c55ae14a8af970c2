#include "cbp/tactical.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "cbp/baseline.hpp"
#include "cbp/golden.hpp"
#include "cbp/hjb.hpp"

namespace cbp {

IntervalBounds default_interval_bounds(const ProblemInstance& inst, const GridConfig& grid) {
  return {10.0 * grid.dt, 10.0 * inst.xi / inst.lambda};
}

double average_profit(const ProblemInstance& inst, double horizon, const GridConfig& grid) {
  const auto sol = solve(inst.with_horizon(horizon), grid);
  return sol.value(0, sol.steps()) / (sol.steps() * sol.dt());
}

namespace {

struct Profile {
  std::vector<double> j0;  // J*(0, n dt)
  double dt = 0.0;
  int n_lo = 1;
  int n_hi = 1;

  double g(int n) const { return j0[n] / (n * dt); }
};

Profile profile(const ProblemInstance& inst, IntervalBounds bounds, const GridConfig& grid) {
  if (!(bounds.t_min > 0.0) || !(bounds.t_max > bounds.t_min)) {
    throw Error(Errc::InvalidInstance, fmt::format("interval bounds [{}, {}] need 0 < T_min < T_max", bounds.t_min,
                                                   bounds.t_max));
  }
  Profile p;
  p.dt = grid.dt;
  p.n_lo = std::max(1, static_cast<int>(std::ceil(bounds.t_min / grid.dt - 1e-9)));
  p.n_hi = std::max(p.n_lo, static_cast<int>(std::floor(bounds.t_max / grid.dt + 1e-9)));
  const auto sol = solve(inst.with_horizon(p.n_hi * grid.dt), grid);
  p.j0.resize(static_cast<std::size_t>(sol.steps()) + 1);
  for (int n = 0; n <= sol.steps(); ++n) p.j0[n] = sol.value(0, n);
  p.n_hi = std::min(p.n_hi, sol.steps());
  return p;
}

struct ProfileMax {
  int n_star;
  std::vector<int> samples;
};

ProfileMax maximize_profile(const Profile& p, double curve_step) {
  const double step = curve_step > 0.0 ? curve_step : 0.1;
  const int stride = std::max(1, static_cast<int>(std::lround(step / p.dt)));
  ProfileMax out;
  for (int n = p.n_lo; n <= p.n_hi; n += stride) out.samples.push_back(n);
  if (out.samples.back() != p.n_hi) out.samples.push_back(p.n_hi);

  auto g = [&](int n) { return p.g(n); };
  auto [n_star, g_star] = golden_max_int(p.n_lo, p.n_hi, g);
  // Guard the unimodality assumption: a sampled point that beats the search
  // result restarts the search around that point.
  for (int n : out.samples) {
    if (p.g(n) > g_star) {
      const auto local = golden_max_int(std::max(p.n_lo, n - stride), std::min(p.n_hi, n + stride), g);
      if (local.second > g_star) std::tie(n_star, g_star) = local;
    }
  }
  out.n_star = n_star;
  out.samples.insert(std::upper_bound(out.samples.begin(), out.samples.end(), n_star), n_star);
  out.samples.erase(std::unique(out.samples.begin(), out.samples.end()), out.samples.end());
  return out;
}

}  // namespace

IntervalResult optimize_interval(const ProblemInstance& inst, IntervalBounds bounds, const GridConfig& grid,
                                 double curve_step) {
  const Profile p = profile(inst, bounds, grid);
  const ProfileMax m = maximize_profile(p, curve_step);
  IntervalResult out;
  out.t_star = m.n_star * p.dt;
  out.g_star = p.g(m.n_star);
  for (int n : m.samples) out.curve.push_back({n * p.dt, p.g(n)});
  const double edge = 2.0 * p.dt + 1e-12;
  if (std::abs(out.t_star - bounds.t_min) <= edge || std::abs(out.t_star - bounds.t_max) <= edge) {
    out.boundary_hit = true;
    out.warning = fmt::format("{}: g(T) is maximized at the search bound T = {:.6g}", to_string(Errc::NoInteriorMaximizer),
                              out.t_star);
  }
  return out;
}

double maintenance_cost_rate(double lambda, int xi, double cp, double cu, double t) {
  return (cp + (cu - cp) * erlang_cdf(xi, lambda, t)) / expected_min_erlang(xi, lambda, t);
}

SequentialResult sequential_interval(double lambda, int xi, double cp, double cu, IntervalBounds bounds) {
  if (!(cp < cu)) throw Error(Errc::InvalidCosts, fmt::format("need cp < cu, got cp = {}, cu = {}", cp, cu));
  if (!(lambda > 0.0) || xi < 1) throw Error(Errc::InvalidInstance, "need lambda > 0 and xi >= 1");
  if (!(bounds.t_min > 0.0) || !(bounds.t_max > bounds.t_min)) {
    throw Error(Errc::InvalidInstance, "interval bounds need 0 < T_min < T_max");
  }
  auto rate = [&](double t) { return maintenance_cost_rate(lambda, xi, cp, cu, t); };
  constexpr int kScan = 400;
  const double h = (bounds.t_max - bounds.t_min) / kScan;
  int best = 0;
  double best_v = rate(bounds.t_min);
  for (int i = 1; i <= kScan; ++i) {
    const double v = rate(bounds.t_min + i * h);
    if (v < best_v) {
      best = i;
      best_v = v;
    }
  }
  const double a = bounds.t_min + std::max(best - 1, 0) * h;
  const double b = bounds.t_min + std::min(best + 1, kScan) * h;
  auto [t_star, v_star] = golden_min(a, b, 1e-10 * bounds.t_max, rate);
  if (best_v < v_star) {
    t_star = bounds.t_min + best * h;
    v_star = best_v;
  }
  SequentialResult out{t_star, v_star, false};
  const double edge = 1e-6 * (bounds.t_max - bounds.t_min);
  out.boundary_hit = t_star - bounds.t_min <= edge || bounds.t_max - t_star <= edge;
  return out;
}

IntervalComparison compare_integrated_sequential(const ProblemInstance& inst, IntervalBounds bounds,
                                                 const GridConfig& grid) {
  if (!inst.cost.is_two_level()) throw Error(Errc::InvalidInstance, "sequential interval needs a two-level cost");
  const Profile p = profile(inst, bounds, grid);
  const ProfileMax m = maximize_profile(p, 0.0);
  const auto seq = sequential_interval(inst.lambda, inst.xi, inst.cost.preventive(), inst.cost.corrective(), bounds);

  IntervalComparison out;
  out.t_integrated = m.n_star * p.dt;
  out.p_integrated = p.g(m.n_star);
  out.t_sequential = seq.t_star;
  const int n_s = std::clamp(static_cast<int>(std::lround(seq.t_star / p.dt)), 1, p.n_hi);
  out.p_sequential = p.g(n_s);
  out.sequential_boundary = seq.boundary_hit;
  const double edge = 2.0 * p.dt + 1e-12;
  out.integrated_boundary =
      std::abs(out.t_integrated - bounds.t_min) <= edge || std::abs(out.t_integrated - bounds.t_max) <= edge;
  if (std::abs(out.p_sequential) < 1e-9) {
    throw Error(Errc::DegenerateBaseline, "sequential profit rate is zero; relative value undefined");
  }
  out.r_hat = 100.0 * (out.p_integrated - out.p_sequential) / out.p_sequential;
  return out;
}

void write_curve_csv(const IntervalResult& result, std::ostream& out) {
  out << "T,g\n";
  for (const auto& pt : result.curve) out << fmt::format("{:.9g},{:.9g}\n", pt.horizon, pt.g);
}

}  // namespace cbp
