#include "cbp/multi.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "tie.hpp"

namespace cbp {

double multi_revenue(std::span<const double> rates, const DemandPenaltyRate& rev) {
  double total = 0.0;
  for (double s : rates) total += s;
  return demand_penalty_value(rev, total);
}

GridConfig default_multi_grid(const MultiInstance& inst) {
  GridConfig g;
  g.n_actions = inst.systems.size() <= 1 ? 101 : 41;
  double rate = 0.0;
  for (const auto& sys : inst.systems) rate += sys.lambda * eval_rate(sys.f, inst.s_max);
  if (rate > 0.0) g.dt = std::min(0.005, 0.5 / rate);
  return g;
}

MultiSolution::MultiSolution(MultiInstance inst, double dt, int steps, double action_step, std::vector<double> values,
                             std::vector<double> policy)
    : inst_(std::move(inst)), dt_(dt), steps_(steps), action_step_(action_step), values_(std::move(values)),
      policy_(std::move(policy)) {
  states_ = 1;
  for (std::size_t i = 0; i < inst_.systems.size(); ++i) states_ *= inst_.xi + 1;
  const std::size_t expected = static_cast<std::size_t>(states_) * (static_cast<std::size_t>(steps_) + 1);
  if (values_.size() != expected || policy_.size() != expected * inst_.systems.size()) {
    throw Error(Errc::InvalidInstance, "multi-system arrays do not match states x (steps+1)");
  }
}

int MultiSolution::state_id(std::span<const int> x) const {
  if (static_cast<int>(x.size()) != systems()) throw Error(Errc::OutOfRange, "state vector has the wrong length");
  int id = 0;
  for (int i = systems() - 1; i >= 0; --i) {
    if (x[i] < 0 || x[i] > inst_.xi) throw Error(Errc::OutOfRange, fmt::format("level {} outside [0, xi]", x[i]));
    id = id * (inst_.xi + 1) + x[i];
  }
  return id;
}

std::vector<int> MultiSolution::state_of(int id) const {
  std::vector<int> x(static_cast<std::size_t>(systems()));
  for (int i = 0; i < systems(); ++i) {
    x[i] = id % (inst_.xi + 1);
    id /= inst_.xi + 1;
  }
  return x;
}

void validate_multi(const MultiInstance& inst, const GridConfig& grid) {
  const int n = static_cast<int>(inst.systems.size());
  if (n < 1 || n > 3) throw Error(Errc::InvalidInstance, fmt::format("between 1 and 3 systems supported, got {}", n));
  if (inst.xi < 1) throw Error(Errc::InvalidInstance, "xi must be >= 1");
  if (!(inst.s_max > 0.0) || !std::isfinite(inst.s_max)) throw Error(Errc::InvalidInstance, "s_max must be > 0");
  validate_cost(inst.cost, inst.xi);
  for (const auto& sys : inst.systems) {
    if (!(sys.lambda > 0.0) || !std::isfinite(sys.lambda)) throw Error(Errc::InvalidInstance, "lambda must be > 0");
    validate_deterioration(sys.f);
  }
  validate_revenue(RateFunction(inst.revenue));
  if (!(inst.horizon > 0.0)) throw Error(Errc::EmptyHorizon, "horizon T must be > 0");
  if (grid.n_actions < 2) throw Error(Errc::InvalidInstance, "n_actions must be >= 2");
  if (std::pow(static_cast<double>(grid.n_actions), n) > 1e6) {
    throw Error(Errc::ActionSpaceTooLarge, fmt::format("{}^{} joint actions exceed 1e6", grid.n_actions, n));
  }
  if (!(grid.dt > 0.0)) throw Error(Errc::InvalidInstance, "dt must be > 0");
  double rate = 0.0;
  for (const auto& sys : inst.systems) rate += sys.lambda * eval_rate(sys.f, inst.s_max);
  if (grid.dt * rate >= 1.0) {
    throw Error(Errc::UnstableGrid, fmt::format("dt * sum lambda_i f_i(s_max) = {} >= 1", grid.dt * rate));
  }
  if (grid.dt > inst.horizon * (1.0 + 1e-12) || horizon_steps(inst.horizon, grid.dt) < 1) {
    throw Error(Errc::EmptyHorizon, "dt exceeds the horizon");
  }
}

namespace {

constexpr int kMaxSystems = 3;

// Keeps the choice the single-system scan would make: with tol == 0 the first
// exact maximizer, otherwise the last candidate within tol of the running max.
// Candidates must arrive in increasing order.
class TieArgmax {
 public:
  explicit TieArgmax(double tol) : tol_(tol) {}

  /// True when idx becomes the choice.
  bool offer(double v, int idx) {
    if (v > best_) best_ = v;
    else if (!(tol_ > 0.0 && v >= best_ - tol_)) return false;
    choice_ = idx;
    score_ = v;
    return true;
  }
  double score() const { return score_; }

 private:
  double tol_;
  double best_ = -std::numeric_limits<double>::infinity();
  int choice_ = 0;
  double score_ = 0.0;
};

struct Model {
  int n = 0;
  int m = 0;
  int xi = 0;
  int states = 0;
  std::vector<double> a;                  // action grid
  std::array<std::vector<double>, kMaxSystems> lamf;  // lambda_i f_i(a_k)
  double lamf_max = 0.0;
  double r_abs = 0.0;
  bool fast = false;
};

Model build(const MultiInstance& inst, const GridConfig& grid, bool allow_fast) {
  Model md;
  md.n = static_cast<int>(inst.systems.size());
  md.m = grid.n_actions;
  md.xi = inst.xi;
  md.states = 1;
  for (int i = 0; i < md.n; ++i) md.states *= inst.xi + 1;
  md.a.resize(static_cast<std::size_t>(md.m));
  for (int k = 0; k < md.m; ++k) md.a[k] = inst.s_max * k / (md.m - 1);
  md.a.back() = inst.s_max;
  for (int i = 0; i < md.n; ++i) {
    for (double s : md.a) md.lamf[i].push_back(inst.systems[i].lambda * eval_rate(inst.systems[i].f, s));
    md.lamf_max += md.lamf[i].back();
  }
  double top = 0.0;
  for (int i = 0; i < md.n; ++i) top += md.a.back();
  md.r_abs = std::max(std::abs(demand_penalty_value(inst.revenue, 0.0)), std::abs(demand_penalty_value(inst.revenue, top)));
  bool convex = true;
  for (const auto& sys : inst.systems) convex = convex && sys.f.as_power()->exponent >= 1.0;
  md.fast = allow_fast && md.n == 2 && inst.revenue.bonus == 0.0 && convex;
  return md;
}

struct Choice {
  std::array<int, kMaxSystems> k{};
  double score = 0.0;
};

// Score of a rate vector, in the same operation order for every path.
double score(const Model& md, const DemandPenaltyRate& rev, const std::array<int, kMaxSystems>& k,
             const std::array<double, kMaxSystems>& delta) {
  double total = 0.0;
  double wear = 0.0;
  for (int i = 0; i < md.n; ++i) {
    total += md.a[k[i]];
    wear += md.lamf[i][k[i]] * delta[i];
  }
  return demand_penalty_value(rev, total) - wear;
}

Choice enumerate(const Model& md, const DemandPenaltyRate& rev, const std::array<bool, kMaxSystems>& free,
                 const std::array<double, kMaxSystems>& delta, double tol) {
  std::array<int, kMaxSystems> hi{};
  for (int i = 0; i < md.n; ++i) hi[i] = free[i] ? md.m - 1 : 0;
  std::array<int, kMaxSystems> k{};
  TieArgmax best(tol);
  std::array<int, kMaxSystems> chosen{};
  int flat = 0;
  // Odometer with the last system fastest, so flat order is lexicographic.
  for (;;) {
    if (best.offer(score(md, rev, k, delta), flat)) chosen = k;
    ++flat;
    int i = md.n - 1;
    while (i >= 0 && k[i] == hi[i]) k[i--] = 0;
    if (i < 0) break;
    ++k[i];
  }
  return {chosen, best.score()};
}

// Two systems, no bonus, convex wear with nonnegative marginal values: for
// each total output the cheapest split is reached by adding one action step at
// a time to the system whose wear grows least, the less loaded one on a tie.
Choice greedy_split(const Model& md, const DemandPenaltyRate& rev, const std::array<double, kMaxSystems>& delta,
                    double tol) {
  std::array<int, kMaxSystems> k{};
  TieArgmax best(tol);
  std::array<int, kMaxSystems> chosen{};
  const int levels = 2 * (md.m - 1);
  for (int total = 0; total <= levels; ++total) {
    if (best.offer(score(md, rev, k, delta), total)) chosen = k;
    if (total == levels) break;
    const double inc0 = k[0] + 1 < md.m ? (md.lamf[0][k[0] + 1] - md.lamf[0][k[0]]) * delta[0] : INFINITY;
    const double inc1 = k[1] + 1 < md.m ? (md.lamf[1][k[1] + 1] - md.lamf[1][k[1]]) * delta[1] : INFINITY;
    if (inc0 < inc1 || (inc0 == inc1 && k[0] <= k[1])) ++k[0];
    else ++k[1];
  }
  return {chosen, best.score()};
}

MultiSolution run(const MultiInstance& inst, const GridConfig& grid, bool allow_fast) {
  validate_multi(inst, grid);
  const Model md = build(inst, grid, allow_fast);
  const int steps = horizon_steps(inst.horizon, grid.dt);
  const double dt = grid.dt;
  const std::size_t S = static_cast<std::size_t>(md.states);
  std::vector<double> values(S * (static_cast<std::size_t>(steps) + 1));
  std::vector<double> policy(values.size() * md.n, 0.0);

  std::array<int, kMaxSystems> stride{};
  for (int i = 0, s = 1; i < md.n; ++i, s *= md.xi + 1) stride[i] = s;
  std::vector<std::array<int, kMaxSystems>> levels(S);
  for (std::size_t id = 0; id < S; ++id) {
    int rest = static_cast<int>(id);
    double cost = 0.0;
    for (int i = 0; i < md.n; ++i) {
      levels[id][i] = rest % (md.xi + 1);
      rest /= md.xi + 1;
      cost += inst.cost(levels[id][i]);
    }
    values[id] = -cost;
  }

  for (int n = 0; n < steps; ++n) {
    const double* cur = values.data() + n * S;
    double* next = values.data() + (n + 1) * S;
    double* pol = policy.data() + (n + 1) * S * md.n;
    for (std::size_t id = 0; id < S; ++id) {
      std::array<bool, kMaxSystems> free{};
      std::array<double, kMaxSystems> delta{};
      double far = 0.0;
      int n_free = 0;
      bool nonneg = true;
      for (int i = 0; i < md.n; ++i) {
        free[i] = levels[id][i] < md.xi;
        if (!free[i]) continue;
        ++n_free;
        const double nb = cur[id + stride[i]];
        delta[i] = cur[id] - nb;
        nonneg = nonneg && delta[i] >= 0.0;
        if (std::abs(nb) > std::abs(far)) far = nb;
      }
      const double tol = tie_tolerance(n, cur[id], far, md.lamf_max, md.r_abs);
      const Choice c = md.fast && n_free == 2 && nonneg ? greedy_split(md, inst.revenue, delta, tol)
                                                        : enumerate(md, inst.revenue, free, delta, tol);
      next[id] = cur[id] + dt * c.score;
      for (int i = 0; i < md.n; ++i) pol[id * md.n + i] = md.a[c.k[i]];
    }
  }
  if (steps > 0) std::copy(policy.begin() + S * md.n, policy.begin() + 2 * S * md.n, policy.begin());
  return MultiSolution(inst, dt, steps, md.a[1] - md.a[0], std::move(values), std::move(policy));
}

}  // namespace

MultiSolution solve_multi(const MultiInstance& inst, const GridConfig& grid) { return run(inst, grid, true); }

MultiSolution solve_multi_enumerate(const MultiInstance& inst, const GridConfig& grid) {
  return run(inst, grid, false);
}

void write_multi_csv(const MultiSolution& sol, std::ostream& out) {
  const int n = sol.systems();
  for (int i = 1; i <= n; ++i) out << 'x' << i << ',';
  out << "n,value";
  for (int i = 1; i <= n; ++i) out << ",s" << i;
  out << '\n';
  for (int id = 0; id < sol.states(); ++id) {
    const auto x = sol.state_of(id);
    for (int step = 0; step <= sol.steps(); ++step) {
      std::string row;
      for (int xi : x) row += fmt::format("{},", xi);
      row += fmt::format("{},{:.9g}", step, sol.value(id, step));
      for (int i = 0; i < n; ++i) row += fmt::format(",{:.9g}", sol.rate(id, step, i));
      out << row << '\n';
    }
  }
}

}  // namespace cbp
