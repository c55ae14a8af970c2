#include "cbp/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "cbp/structure.hpp"
#include "tie.hpp"

namespace cbp {

SolutionGrid::SolutionGrid(ProblemInstance inst, double dt, int steps, double action_step, std::vector<double> values,
                           std::vector<double> policy)
    : inst_(std::move(inst)),
      dt_(dt),
      steps_(steps),
      action_step_(action_step),
      values_(std::move(values)),
      policy_(std::move(policy)) {
  const std::size_t expected = width() * (static_cast<std::size_t>(steps_) + 1);
  if (values_.size() != expected || policy_.size() != expected) {
    throw Error(Errc::InvalidInstance, "solution arrays do not match (xi+1) x (steps+1)");
  }
}

MarginalGrid::MarginalGrid(const SolutionGrid& sol) : xi_(sol.xi()), steps_(sol.steps()) {
  const std::size_t cols = static_cast<std::size_t>(steps_) + 1;
  delta_.resize(static_cast<std::size_t>(xi_) * cols);
  delta2_.resize(static_cast<std::size_t>(std::max(xi_ - 1, 0)) * cols);
  for (int x = 0; x < xi_; ++x) {
    for (int n = 0; n <= steps_; ++n) delta_[x * cols + n] = sol.value(x, n) - sol.value(x + 1, n);
  }
  for (int x = 0; x + 1 < xi_; ++x) {
    for (int n = 0; n <= steps_; ++n) delta2_[x * cols + n] = delta_[x * cols + n] - delta_[(x + 1) * cols + n];
  }
}

GridConfig resolve_action_set(const ProblemInstance& inst, GridConfig grid) {
  if (grid.action_set == ActionSet::Automatic) {
    grid.action_set = check_bang_bang(inst).is_bang_bang ? ActionSet::BangBang : ActionSet::Full;
  }
  return grid;
}

std::vector<double> action_grid(const ProblemInstance& inst, const GridConfig& grid) {
  const GridConfig resolved = resolve_action_set(inst, grid);
  if (resolved.action_set == ActionSet::BangBang) return {0.0, inst.s_max};
  std::vector<double> actions(static_cast<std::size_t>(grid.n_actions));
  for (int k = 0; k < grid.n_actions; ++k) actions[k] = inst.s_max * k / (grid.n_actions - 1);
  actions.back() = inst.s_max;
  return actions;
}

namespace {

struct ActionTable {
  std::vector<double> s;
  std::vector<double> r;
  std::vector<double> lamf;  // lambda * f(s)
};

ActionTable make_table(const ProblemInstance& inst, const GridConfig& grid) {
  ActionTable t;
  t.s = action_grid(inst, grid);
  for (double s : t.s) {
    t.r.push_back(eval_rate(inst.r, s));
    t.lamf.push_back(inst.lambda * eval_rate(inst.f, s));
  }
  return t;
}

int scan_argmax(const ActionTable& t, double d, double tol) {
  const int m = static_cast<int>(t.s.size());
  double vmax = t.r[0] - t.lamf[0] * d;
  for (int k = 1; k < m; ++k) vmax = std::max(vmax, t.r[k] - t.lamf[k] * d);
  if (tol == 0.0) {
    for (int k = 0; k < m; ++k)
      if (t.r[k] - t.lamf[k] * d == vmax) return k;
  }
  for (int k = m - 1; k > 0; --k)
    if (t.r[k] - t.lamf[k] * d >= vmax - tol) return k;
  return 0;
}

// Upper envelope of the lines v_k(d) = r_k - lamf_k * d. lamf is strictly
// increasing in k, so for growing d the maximizing index moves toward 0.
class Envelope {
 public:
  explicit Envelope(const ActionTable& t) : t_(t) {
    const int m = static_cast<int>(t.s.size());
    // Slope -lamf ascending means k descending.
    for (int k = m - 1; k >= 0; --k) {
      if (!hull_.empty() && t.lamf[hull_.back()] == t.lamf[k]) {
        if (t.r[k] >= t.r[hull_.back()]) hull_.pop_back();
        else continue;
      }
      while (hull_.size() >= 2) {
        const int a = hull_[hull_.size() - 2];
        const int b = hull_.back();
        if (cross(a, k) <= cross(a, b)) hull_.pop_back();
        else break;
      }
      hull_.push_back(k);
    }
    for (std::size_t i = 0; i + 1 < hull_.size(); ++i) breaks_.push_back(cross(hull_[i], hull_[i + 1]));
  }

  int argmax(double d, double tol) const {
    const auto pos = static_cast<std::size_t>(std::upper_bound(breaks_.begin(), breaks_.end(), d) - breaks_.begin());
    // Re-score the neighbours with the same arithmetic the enumerating solver
    // uses so both agree at floating-point ties.
    int best = hull_[pos];
    double best_v = value(best, d);
    const std::size_t lo = pos > 0 ? pos - 1 : pos;
    const std::size_t hi = std::min(pos + 1, hull_.size() - 1);
    for (std::size_t i = lo; i <= hi; ++i) {
      const int k = hull_[i];
      const double v = value(k, d);
      if (v > best_v || (v == best_v && k < best)) {
        best = k;
        best_v = v;
      }
    }
    if (tol == 0.0) return best;
    // Near ties are rare; settle them with the reference scan.
    const int m = static_cast<int>(t_.s.size());
    for (std::size_t i = lo; i <= hi; ++i) {
      if (hull_[i] != best && value(hull_[i], d) >= best_v - tol) return scan_argmax(t_, d, tol);
    }
    if (best + 1 < m && value(best + 1, d) >= best_v - tol) return scan_argmax(t_, d, tol);
    return best;
  }

  double value(int k, double d) const { return t_.r[k] - t_.lamf[k] * d; }

 private:
  // d at which lines a and b intersect.
  double cross(int a, int b) const { return (t_.r[b] - t_.r[a]) / (t_.lamf[b] - t_.lamf[a]); }

  const ActionTable& t_;
  std::vector<int> hull_;
  std::vector<double> breaks_;
};

template <class Argmax>
SolutionGrid run_recursion(const ValidatedInstance& vi, const ActionTable& table, Argmax&& argmax) {
  const ProblemInstance& inst = vi.instance();
  const double dt = vi.grid().dt;
  const int steps = vi.steps();
  const int xi = inst.xi;
  const std::size_t w = static_cast<std::size_t>(xi) + 1;
  std::vector<double> values(w * (static_cast<std::size_t>(steps) + 1));
  std::vector<double> policy(values.size(), 0.0);
  for (int x = 0; x <= xi; ++x) values[x] = -inst.cost(x);
  const double r_off = eval_rate(inst.r, 0.0);
  const double lamf_max = table.lamf.back();
  double r_abs = 0.0;
  for (double r : table.r) r_abs = std::max(r_abs, std::abs(r));

  for (int n = 0; n < steps; ++n) {
    const double* cur = values.data() + n * w;
    double* next = values.data() + (n + 1) * w;
    double* pol = policy.data() + (n + 1) * w;
    for (int x = 0; x < xi; ++x) {
      const double delta = cur[x] - cur[x + 1];
      const int k = argmax(delta, tie_tolerance(n, cur[x], cur[x + 1], lamf_max, r_abs));
      next[x] = cur[x] + dt * (table.r[k] - table.lamf[k] * delta);
      pol[x] = table.s[k];
    }
    next[xi] = cur[xi] + dt * r_off;
    pol[xi] = 0.0;
  }
  // At n = 0 the policy is the action chosen against the boundary values.
  if (steps > 0) std::copy(policy.begin() + w, policy.begin() + 2 * w, policy.begin());

  const double step = table.s.size() > 1 ? table.s[1] - table.s[0] : inst.s_max;
  return SolutionGrid(inst, dt, steps, step, std::move(values), std::move(policy));
}

}  // namespace

SolutionGrid solve(const ValidatedInstance& vi) {
  const GridConfig grid = resolve_action_set(vi.instance(), vi.grid());
  const ActionTable table = make_table(vi.instance(), grid);
  const Envelope env(table);
  return run_recursion(vi, table, [&](double d, double tol) { return env.argmax(d, tol); });
}

SolutionGrid solve_enumerate(const ValidatedInstance& vi) {
  const GridConfig grid = resolve_action_set(vi.instance(), vi.grid());
  const ActionTable table = make_table(vi.instance(), grid);
  return run_recursion(vi, table, [&](double d, double tol) { return scan_argmax(table, d, tol); });
}

SolutionGrid solve(const ProblemInstance& inst, const GridConfig& grid) { return solve(validate_instance(inst, grid)); }

SolutionGrid solve_refined(const ProblemInstance& inst, const GridConfig& grid) {
  GridConfig g = grid;
  g.dt = grid.dt / stability_refinement(grid.dt, inst.lambda * eval_rate(inst.f, inst.s_max));
  return solve(inst, g);
}

namespace {
int time_index(const SolutionGrid& sol, int x, double t) {
  if (x < 0 || x > sol.xi()) throw Error(Errc::OutOfRange, "state " + std::to_string(x) + " outside [0, xi]");
  const double tol = 1e-9 * std::max(1.0, sol.horizon());
  if (!(t >= -tol) || t > sol.horizon() + tol) {
    throw Error(Errc::OutOfRange, "remaining time " + std::to_string(t) + " outside [0, T]");
  }
  const int n = static_cast<int>(std::ceil(t / sol.dt() - 0.5));
  return std::clamp(n, 0, sol.steps());
}
}  // namespace

double value_at(const SolutionGrid& sol, int x, double t) { return sol.value(x, time_index(sol, x, t)); }

double policy_at(const SolutionGrid& sol, int x, double t) { return sol.policy(x, time_index(sol, x, t)); }

MarginalGrid marginals(const SolutionGrid& sol) { return MarginalGrid(sol); }

void write_solution_csv(const SolutionGrid& sol, std::ostream& out) {
  out << "x,n,t_remaining,value,policy\n";
  for (int x = 0; x <= sol.xi(); ++x) {
    for (int n = 0; n <= sol.steps(); ++n) {
      out << fmt::format("{},{},{:.9g},{:.9g},{:.9g}\n", x, n, n * sol.dt(), sol.value(x, n), sol.policy(x, n));
    }
  }
}

}  // namespace cbp
