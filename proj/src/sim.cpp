#include "cbp/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <ostream>

#include <boost/math/distributions/gamma.hpp>
#include <fmt/format.h>

namespace cbp {

namespace {

// Drives one path cell by cell. Candidate shocks come from a homogeneous
// Poisson process at the envelope rate for the whole horizon, so the random
// numbers consumed do not depend on the policy.
class PathRunner {
 public:
  PathRunner(const ProblemInstance& inst, double true_lambda, double horizon, double dt, SplitMix64& rng)
      : inst_(inst), lambda_(true_lambda), horizon_(horizon), dt_(dt), rng_(rng) {
    if (!(true_lambda > 0.0)) throw Error(Errc::InvalidInstance, "true base rate must be > 0");
    if (!(dt > 0.0) || !(horizon > 0.0)) throw Error(Errc::EmptyHorizon, "horizon and dt must be > 0");
    cells_ = std::max(1, static_cast<int>(std::ceil(horizon / dt - 1e-9)));
    envelope_ = lambda_ * eval_rate(inst.f, inst.s_max);
    next_ = envelope_ > 0.0 ? rng_.exponential(envelope_) : INFINITY;
    path_.applied_rate.reserve(static_cast<std::size_t>(cells_));
  }

  int cells() const { return cells_; }
  int level() const { return x_; }
  const Trajectory& path() const { return path_; }

  template <class RateFn>
  void run(int k_end, RateFn&& rate) {
    for (; k_ < std::min(k_end, cells_); ++k_) step(rate(x_, k_));
  }

  Trajectory finish() {
    path_.final_level = x_;
    path_.maintenance_cost = inst_.cost(x_);
    path_.profit = path_.revenue - path_.maintenance_cost;
    return std::move(path_);
  }

 private:
  void step(double s) {
    const double start = k_ * dt_;
    const double end = k_ + 1 == cells_ ? horizon_ : (k_ + 1) * dt_;
    if (x_ == inst_.xi) s = 0.0;
    if (!(s >= 0.0) || s > inst_.s_max * (1 + 1e-12)) {
      throw Error(Errc::RateOutOfRange, fmt::format("policy rate {} outside [0, {}]", s, inst_.s_max));
    }
    path_.applied_rate.push_back(s);
    const double accept = envelope_ > 0.0 ? lambda_ * eval_rate(inst_.f, s) / envelope_ : 0.0;
    if (accept > 1.0 + 1e-12) {
      throw Error(Errc::EnvelopeViolated, fmt::format("acceptance probability {} above 1", accept));
    }
    double seg = start;
    while (next_ < end) {
      const double tau = next_;
      next_ += rng_.exponential(envelope_);
      const double u = rng_.uniform();
      if (x_ < inst_.xi && u < accept) {
        ++x_;
        path_.events.push_back({tau, x_});
        if (x_ == inst_.xi) {
          accrue(s, tau - seg);
          seg = tau;
          s = 0.0;
        }
      }
    }
    accrue(s, end - seg);
  }

  void accrue(double s, double len) {
    path_.revenue += eval_rate(inst_.r, s) * len;
    path_.usage.value += eval_rate(inst_.f, s) * len;
  }

  const ProblemInstance& inst_;
  double lambda_;
  double horizon_;
  double dt_;
  SplitMix64& rng_;
  int cells_ = 0;
  int k_ = 0;
  int x_ = 0;
  double envelope_ = 0.0;
  double next_ = INFINITY;
  Trajectory path_;
};

double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) return std::accumulate(v, v + n, 0.0);
  const std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

struct Stats {
  double mean;
  double var;
};

Stats stats(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = pairwise_sum(v.data(), v.size()) / n;
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - mean) * (v[i] - mean);
  return {mean, v.size() > 1 ? pairwise_sum(sq.data(), sq.size()) / (n - 1) : 0.0};
}

Trajectory run_ce(const ProblemInstance& inst, const GammaPrior& prior, double true_lambda, int n_opt,
                  const GridConfig& grid, SplitMix64& rng, CETrace* trace, const SolutionGrid* phase0) {
  const auto schedule = ce_schedule(inst.horizon, n_opt);
  PathRunner runner(inst, true_lambda, inst.horizon, grid.dt, rng);
  const int cells = runner.cells();

  std::optional<SolutionGrid> own;
  auto resolve = [&](double lambda_hat) -> const SolutionGrid& {
    own.emplace(solve_refined(inst.with_lambda(lambda_hat), grid));
    return *own;
  };
  double lambda_hat = prior.mean();
  const SolutionGrid* sol = phase0 ? phase0 : &resolve(lambda_hat);
  if (trace) *trace = CETrace{{lambda_hat}, {}, {}, {}};

  for (std::size_t j = 0; j <= schedule.epochs.size(); ++j) {
    const int k_end =
        j < schedule.epochs.size() ? static_cast<int>(std::lround(schedule.epochs[j] / grid.dt)) : cells;
    runner.run(k_end, [&](int x, int k) { return policy_at(*sol, x, std::max(0.0, inst.horizon - k * grid.dt)); });
    if (j == schedule.epochs.size()) break;
    const auto& p = runner.path();
    lambda_hat = ce_estimate(prior, runner.level(), p.usage);
    sol = &resolve(lambda_hat);
    if (trace) {
      trace->lambda_hat.push_back(lambda_hat);
      trace->epoch_cells.push_back(k_end);
      trace->level_at_epoch.push_back(runner.level());
      trace->usage_at_epoch.push_back(p.usage.value);
    }
  }
  return runner.finish();
}

}  // namespace

Trajectory simulate_path(const SolutionGrid& policy, double true_lambda, SplitMix64& rng) {
  PathRunner runner(policy.instance(), true_lambda, policy.horizon(), policy.dt(), rng);
  const int n = policy.steps();
  runner.run(n, [&](int x, int k) { return policy.policy(x, n - k); });
  return runner.finish();
}

Trajectory simulate_path(const SolutionGrid& policy, double true_lambda, std::uint64_t seed) {
  SplitMix64 rng(seed);
  return simulate_path(policy, true_lambda, rng);
}

Trajectory simulate_static(const ProblemInstance& inst, double s, double horizon, double dt, SplitMix64& rng) {
  PathRunner runner(inst, inst.lambda, horizon, dt, rng);
  runner.run(runner.cells(), [&](int, int) { return s; });
  return runner.finish();
}

Trajectory simulate_ce(const ProblemInstance& inst, const GammaPrior& prior, double true_lambda, int n_opt,
                       const GridConfig& grid, SplitMix64& rng, CETrace* trace) {
  return run_ce(inst, prior, true_lambda, n_opt, grid, rng, trace, nullptr);
}

double draw_base_rate(const GammaPrior& prior, SplitMix64& rng) {
  const boost::math::gamma_distribution<double> dist(prior.alpha, 1.0 / prior.beta);
  return boost::math::quantile(dist, rng.uniform());
}

RegretEstimate estimate_regret(const RegretConfig& config, std::uint64_t seed) {
  if (config.reps < 2) throw Error(Errc::InvalidInstance, "regret needs at least 2 replications");
  constexpr int kMaxReps = 100000;
  const auto& inst = config.inst;
  const SolutionGrid phase0 = solve_refined(inst.with_lambda(config.prior.mean()), config.grid);

  RegretEstimate est;
  std::vector<double> oracle;
  std::vector<double> ce;
  auto run_reps = [&](int from, int to) {
    for (int rep = from; rep < to; ++rep) {
      auto draw = substream(seed, static_cast<std::uint64_t>(rep), 0);
      const double lambda_star = draw_base_rate(config.prior, draw);
      const auto sol = solve_refined(inst.with_lambda(lambda_star), config.grid);
      double o = sol.value(0, sol.steps());
      if (config.oracle == OracleMode::Simulated) {
        // Same stream as the CE path below: the two paths differ only through policy.
        auto lane = substream(seed, static_cast<std::uint64_t>(rep), 1);
        o = simulate_path(sol, lambda_star, lane).profit;
      }
      auto lane = substream(seed, static_cast<std::uint64_t>(rep), 1);
      const double c = run_ce(inst, config.prior, lambda_star, config.n_opt, config.grid, lane, nullptr, &phase0).profit;
      oracle.push_back(o);
      ce.push_back(c);
      est.records.push_back({rep, lambda_star, o, c});
    }
  };

  int reps = config.reps;
  run_reps(0, reps);
  for (;;) {
    const auto so = stats(oracle);
    const auto sc = stats(ce);
    const double n = static_cast<double>(oracle.size());
    est.reps = static_cast<int>(oracle.size());
    est.oracle_mean = so.mean;
    est.ce_mean = sc.mean;
    est.oracle_halfwidth = 1.96 * std::sqrt(so.var / n);
    est.ce_halfwidth = 1.96 * std::sqrt(sc.var / n);
    est.ci_target_met = est.oracle_halfwidth < 1e-3 * std::abs(so.mean) && est.ce_halfwidth < 1e-3 * std::abs(sc.mean);
    if (!config.escalate || est.ci_target_met || reps >= kMaxReps) break;
    const int next = std::min(2 * reps, kMaxReps);
    run_reps(reps, next);
    reps = next;
  }
  if (!(est.oracle_mean > 0.0)) {
    throw Error(Errc::NonPositiveOracleMean, fmt::format("oracle mean profit {} is not positive", est.oracle_mean));
  }
  const double ratio = est.ce_mean / est.oracle_mean;
  std::vector<double> resid(oracle.size());
  for (std::size_t i = 0; i < oracle.size(); ++i) resid[i] = ce[i] - ratio * oracle[i];
  const auto sr = stats(resid);
  est.mean_regret = 100.0 * (1.0 - ratio);
  est.ci_halfwidth = 1.96 * 100.0 * std::sqrt(sr.var / static_cast<double>(resid.size())) / est.oracle_mean;
  return est;
}

void write_replications_csv(const RegretEstimate& est, std::ostream& out) {
  out << "rep,lambda_star,oracle_value,ce_profit\n";
  for (const auto& r : est.records) {
    out << fmt::format("{},{:.9g},{:.9g},{:.9g}\n", r.rep, r.lambda_star, r.oracle_value, r.ce_profit);
  }
}

}  // namespace cbp
