#include "cbp/cli.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "cbp/baseline.hpp"
#include "cbp/bayes.hpp"
#include "cbp/hjb.hpp"
#include "cbp/structure.hpp"
#include "cbp/tactical.hpp"

#ifndef CBP_VERSION
#define CBP_VERSION "0.0.0"
#endif

namespace cbp {

namespace fs = std::filesystem;

namespace {

std::string_view to_string(ActionSet set) {
  switch (set) {
    case ActionSet::Automatic: return "automatic";
    case ActionSet::Full: return "full";
    case ActionSet::BangBang: return "bang_bang";
  }
  return "?";
}

std::ofstream open_output(const fs::path& dir, const std::string& name, RunReport& report) {
  std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::ConfigError, fmt::format("cannot write '{}'", (dir / name).string()));
  report.outputs.push_back(name);
  return out;
}

std::string num(double v) { return fmt::format("{:.9g}", v); }

IntervalBounds tactical_bounds(const ExperimentConfig& cfg, const GridConfig& grid) {
  auto b = default_interval_bounds(cfg.instance, grid);
  if (cfg.tactical.t_min) b.t_min = *cfg.tactical.t_min;
  if (cfg.tactical.t_max) b.t_max = *cfg.tactical.t_max;
  return b;
}

bool sequential_applies(const ProblemInstance& inst) {
  return inst.cost.is_two_level() && inst.cost.preventive() < inst.cost.corrective();
}

// Result columns shared by the single-run summaries and the sweep rows.
struct Columns {
  std::string header;
  std::string row;
};

Columns tactical_columns(const ExperimentConfig& cfg, const GridConfig& grid, std::ostream& log,
                         IntervalResult* curve_out) {
  const auto bounds = tactical_bounds(cfg, grid);
  auto res = optimize_interval(cfg.instance, bounds, grid, cfg.tactical.curve_step);
  if (res.warning) log << "warning: " << *res.warning << "\n";
  Columns c{"t_star,g_star,boundary_hit,t_sequential,p_integrated,p_sequential,R_hat",
            fmt::format("{},{},{}", num(res.t_star), num(res.g_star), res.boundary_hit ? 1 : 0)};
  if (sequential_applies(cfg.instance)) {
    const auto cmp = compare_integrated_sequential(cfg.instance, bounds, grid);
    c.row += fmt::format(",{},{},{},{}", num(cmp.t_sequential), num(cmp.p_integrated), num(cmp.p_sequential),
                         num(cmp.r_hat));
  } else {
    c.row += ",,,,";
  }
  if (curve_out) *curve_out = std::move(res);
  return c;
}

Columns baseline_columns(const ExperimentConfig& cfg, const GridConfig& grid) {
  const auto cmp = compare_with_fixed_rate(cfg.instance, grid);
  return {"s_star,p_fs,p_cs,R",
          fmt::format("{},{},{},{}", num(cmp.fixed.s_star), num(cmp.fixed.expected_profit), num(cmp.p_cs),
                      num(cmp.r_percent))};
}

RegretConfig regret_config(const ExperimentConfig& cfg, const GridConfig& grid) {
  RegretConfig rc;
  rc.inst = cfg.instance;
  rc.prior = prior_from_mean_cv(cfg.simulate.prior_mean, cfg.simulate.prior_cv);
  rc.n_opt = cfg.simulate.n_opt;
  rc.reps = cfg.reps;
  rc.grid = grid;
  rc.oracle = cfg.simulate.oracle;
  rc.escalate = cfg.simulate.escalate;
  return rc;
}

Columns regret_columns(const RegretEstimate& est) {
  return {"reps,oracle_mean,ce_mean,mean_regret,ci_halfwidth,ci_target_met",
          fmt::format("{},{},{},{},{},{}", est.reps, num(est.oracle_mean), num(est.ce_mean), num(est.mean_regret),
                      num(est.ci_halfwidth), est.ci_target_met ? 1 : 0)};
}

std::vector<double> structure_lambdas(const ExperimentConfig& cfg) {
  return cfg.structure.lambdas.empty() ? std::vector<double>{cfg.instance.lambda} : cfg.structure.lambdas;
}

// Grid fine enough for the largest base rate, so all solutions line up.
GridConfig structure_grid(const ExperimentConfig& cfg) {
  auto copy = cfg;
  for (double l : structure_lambdas(cfg)) copy.instance.lambda = std::max(copy.instance.lambda, l);
  return resolve_grid(copy);
}

StructureReport structure_report(const ExperimentConfig& cfg, const GridConfig& grid,
                                 std::vector<SolutionGrid>* sols_out) {
  std::vector<SolutionGrid> sols;
  for (double l : structure_lambdas(cfg)) sols.push_back(solve(cfg.instance.with_lambda(l), grid));
  auto report = verify_structure(sols);
  if (sols_out) *sols_out = std::move(sols);
  return report;
}

Columns command_columns(Command cmd, const ExperimentConfig& cfg, const GridConfig& grid, std::ostream& log) {
  switch (cmd) {
    case Command::Solve: {
      const auto sol = solve(cfg.instance, grid);
      return {"value", num(sol.value(0, sol.steps()))};
    }
    case Command::Structure: {
      const auto verdict = check_bang_bang(cfg.instance);
      const auto report = structure_report(cfg, grid, nullptr);
      int failed = 0;
      for (const auto& p : report.properties) failed += p.pass ? 0 : 1;
      return {"bang_bang,failed_properties", fmt::format("{},{}", verdict.is_bang_bang ? 1 : 0, failed)};
    }
    case Command::Tactical: return tactical_columns(cfg, grid, log, nullptr);
    case Command::Baseline: return baseline_columns(cfg, grid);
    case Command::Simulate: return regret_columns(estimate_regret(regret_config(cfg, grid), cfg.seed));
    default: throw Error(Errc::ConfigError, fmt::format("command '{}' cannot be swept", to_string(cmd)));
  }
}

// Headers do not depend on the instance, so a throwaway run is never needed.
std::string columns_header(Command cmd) {
  switch (cmd) {
    case Command::Solve: return "value";
    case Command::Structure: return "bang_bang,failed_properties";
    case Command::Tactical: return "t_star,g_star,boundary_hit,t_sequential,p_integrated,p_sequential,R_hat";
    case Command::Baseline: return "s_star,p_fs,p_cs,R";
    case Command::Simulate: return "reps,oracle_mean,ce_mean,mean_regret,ci_halfwidth,ci_target_met";
    default: throw Error(Errc::ConfigError, fmt::format("command '{}' cannot be swept", to_string(cmd)));
  }
}

int count_commas(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), ',')); }

void run_solve(const ExperimentConfig& cfg, const fs::path& dir, RunReport& rep, std::ostream& log) {
  const auto sol = solve(cfg.instance, rep.grid);
  auto out = open_output(dir, "solution.csv", rep);
  write_solution_csv(sol, out);
  log << fmt::format("J*(0, T) = {:.6f}  (T = {}, dt = {}, {} steps)\n", sol.value(0, sol.steps()), sol.horizon(),
                     sol.dt(), sol.steps());
}

void run_structure(const ExperimentConfig& cfg, const fs::path& dir, RunReport& rep, std::ostream& log) {
  rep.grid = structure_grid(cfg);
  const auto verdict = check_bang_bang(cfg.instance);
  log << fmt::format("bang-bang: {} ({})\n", verdict.is_bang_bang ? "yes" : "no", to_string(verdict.reason));
  std::vector<SolutionGrid> sols;
  const auto report = structure_report(cfg, rep.grid, &sols);
  write_structure_table(report, log);
  auto out = open_output(dir, "structure.csv", rep);
  write_structure_csv(report, out);
  if (!verdict.is_bang_bang) return;
  auto curve_out = open_output(dir, "switching_curve.csv", rep);
  curve_out << "lambda,n,t_remaining,threshold\n";
  for (const auto& sol : sols) {
    const auto curve = extract_switching_curve(sol);
    for (std::size_t n = 0; n < curve.threshold.size(); ++n) {
      curve_out << fmt::format("{},{},{},{}\n", num(sol.instance().lambda), n, num(static_cast<double>(n) * sol.dt()),
                               curve.threshold[n]);
    }
  }
}

void run_tactical(const ExperimentConfig& cfg, const fs::path& dir, RunReport& rep, std::ostream& log) {
  IntervalResult res;
  const auto cols = tactical_columns(cfg, rep.grid, log, &res);
  auto curve = open_output(dir, "curve.csv", rep);
  write_curve_csv(res, curve);
  auto summary = open_output(dir, "tactical.csv", rep);
  summary << cols.header << "\n" << cols.row << "\n";
  log << fmt::format("T* = {:.4f}  g(T*) = {:.6f}{}\n", res.t_star, res.g_star,
                     res.boundary_hit ? "  (search bound)" : "");
}

void run_baseline(const ExperimentConfig& cfg, const fs::path& dir, RunReport& rep, std::ostream& log) {
  const auto cmp = compare_with_fixed_rate(cfg.instance, rep.grid);
  auto out = open_output(dir, "baseline.csv", rep);
  write_baseline_header(out);
  write_baseline_row(cfg.instance, cmp, out);
  log << fmt::format("P_CS = {:.6f}  P_FS = {:.6f} at s = {:.4f}  R = {:.3f}%\n", cmp.p_cs, cmp.fixed.expected_profit,
                     cmp.fixed.s_star, cmp.r_percent);
}

void run_simulate(const ExperimentConfig& cfg, const fs::path& dir, RunReport& rep, std::ostream& log) {
  const auto est = estimate_regret(regret_config(cfg, rep.grid), cfg.seed);
  auto reps = open_output(dir, "replications.csv", rep);
  write_replications_csv(est, reps);
  const auto cols = regret_columns(est);
  auto summary = open_output(dir, "regret.csv", rep);
  summary << "n_opt,prior_mean,prior_cv," << cols.header << "\n"
          << fmt::format("{},{},{},", cfg.simulate.n_opt, num(cfg.simulate.prior_mean), num(cfg.simulate.prior_cv))
          << cols.row << "\n";
  log << fmt::format("regret = {:.3f}% +- {:.3f}  ({} reps)\n", est.mean_regret, est.ci_halfwidth, est.reps);
  if (!est.ci_target_met && cfg.simulate.escalate) log << "warning: CI target not met at the replication cap\n";
}

void run_multi(const ExperimentConfig& cfg, const fs::path& dir, RunReport& rep, std::ostream& log) {
  if (cfg.multi.systems.empty()) throw Error(Errc::ConfigError, "multi needs a 'multi' section with systems");
  MultiInstance mi;
  mi.systems = cfg.multi.systems;
  mi.xi = cfg.instance.xi;
  mi.s_max = cfg.instance.s_max;
  mi.cost = cfg.instance.cost;
  mi.revenue = cfg.multi.revenue;
  mi.horizon = cfg.instance.horizon;
  rep.grid = default_multi_grid(mi);
  if (cfg.dt) rep.grid.dt = *cfg.dt;
  if (cfg.n_actions) rep.grid.n_actions = *cfg.n_actions;
  const auto sol = solve_multi(mi, rep.grid);
  auto out = open_output(dir, "multi.csv", rep);
  write_multi_csv(sol, out);
  std::vector<int> zero(mi.systems.size(), 0);
  log << fmt::format("J*(0, T) = {:.6f}  ({} systems, {} states, {} steps)\n", sol.value(zero, sol.steps()),
                     mi.systems.size(), sol.states(), sol.steps());
}

void run_sweep(const ExperimentConfig& cfg, const fs::path& dir, RunReport& rep, std::ostream& log) {
  const auto& axes = cfg.sweep.axes;
  if (axes.empty()) throw Error(Errc::ConfigError, "sweep needs a 'sweep' section with axes");
  const std::string header = sweep_header(cfg);
  const fs::path path = dir / "sweep.csv";

  // Resume: keep complete rows of a previous run with the same header.
  std::size_t done = 0;
  std::string kept;
  if (fs::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    std::string line;
    if (std::getline(in, line) && line == header) {
      kept = header + "\n";
      const int commas = count_commas(header);
      while (std::getline(in, line)) {
        if (in.eof() || count_commas(line) != commas) break;
        kept += line + "\n";
        ++done;
      }
    }
  }
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::ConfigError, fmt::format("cannot write '{}'", path.string()));
    out << (done > 0 ? kept : header + "\n");
  }
  rep.outputs.push_back("sweep.csv");

  std::size_t total = 1;
  for (const auto& a : axes) total *= a.values.size();
  if (done > 0) log << fmt::format("resuming sweep after {} of {} points\n", done, total);

  std::ofstream out(path, std::ios::binary | std::ios::app);
  for (std::size_t k = done; k < total; ++k) {
    auto point = cfg;
    std::string prefix;
    std::size_t rest = k;
    // Last axis varies fastest.
    std::vector<double> values(axes.size());
    for (std::size_t i = axes.size(); i-- > 0;) {
      values[i] = axes[i].values[rest % axes[i].values.size()];
      rest /= axes[i].values.size();
    }
    for (double v : values) prefix += num(v) + ",";
    std::string row;
    std::string status = "ok";
    try {
      for (std::size_t i = 0; i < axes.size(); ++i) apply_axis(point, axes[i].key, values[i]);
      const auto grid = point.sweep.command == Command::Structure ? structure_grid(point) : resolve_grid(point);
      row = command_columns(point.sweep.command, point, grid, log).row;
    } catch (const Error& e) {
      row = std::string(static_cast<std::size_t>(count_commas(columns_header(point.sweep.command))), ',');
      status = std::string(to_string(e.code()));
      log << fmt::format("point {}: {}: {}\n", k, status, e.what());
    }
    out << prefix << row << "," << status << "\n";
    out.flush();
  }
  rep.grid = resolve_grid(cfg);
  log << fmt::format("sweep: {} points in {}\n", total, path.string());
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const ExperimentConfig& cfg, const fs::path& dir, RunReport& rep) {
  nlohmann::json m;
  m["version"] = CBP_VERSION;
  m["command"] = std::string(to_string(cfg.command));
  m["config"] = cfg.source;
  m["config_hash"] = fmt::format("{:016x}", config_hash(cfg));
  m["seed"] = cfg.seed;
  m["reps"] = cfg.reps;
  m["grid"] = {{"dt", rep.grid.dt},
               {"n_actions", rep.grid.n_actions},
               {"action_set", std::string(to_string(rep.grid.action_set))}};
  m["outputs"] = rep.outputs;
  m["created"] = utc_timestamp();
  std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
  out << m.dump(2) << "\n";
}

}  // namespace

std::string sweep_header(const ExperimentConfig& cfg) {
  std::string h;
  for (const auto& a : cfg.sweep.axes) h += a.key + ",";
  return h + columns_header(cfg.sweep.command) + ",status";
}

RunReport run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  const fs::path dir(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::ConfigError, fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));

  RunReport rep;
  if (cfg.command != Command::Multi && cfg.command != Command::Sweep) {
    rep.grid = resolve_grid(cfg);
  }
  switch (cfg.command) {
    case Command::Solve: run_solve(cfg, dir, rep, log); break;
    case Command::Structure: run_structure(cfg, dir, rep, log); break;
    case Command::Tactical: run_tactical(cfg, dir, rep, log); break;
    case Command::Baseline: run_baseline(cfg, dir, rep, log); break;
    case Command::Simulate: run_simulate(cfg, dir, rep, log); break;
    case Command::Multi: run_multi(cfg, dir, rep, log); break;
    case Command::Sweep: run_sweep(cfg, dir, rep, log); break;
  }
  write_manifest(cfg, dir, rep);
  rep.outputs.push_back("manifest.json");
  return rep;
}

}  // namespace cbp
