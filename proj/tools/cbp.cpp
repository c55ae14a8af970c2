#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cbp/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Condition-based production planning: optimal rates, maintenance intervals and learning"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;
  std::optional<double> dt;
  std::optional<int> actions;
  std::optional<int> n_opt;

  const char* commands[][2] = {
      {"solve", "value function and optimal rate policy"},
      {"structure", "bang-bang test, structural properties and switching curves"},
      {"tactical", "optimal maintenance interval and g(T) curve"},
      {"baseline", "gain over the best fixed production rate"},
      {"simulate", "regret of certainty-equivalent learning"},
      {"multi", "several systems sharing one demand"},
      {"sweep", "one command over a grid of instance parameters"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", config_path, "YAML experiment file")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--out", out_dir, "output directory (overrides 'out')");
    sub->add_option("--seed", seed, "RNG seed (overrides 'seed')");
    sub->add_option("--reps", reps, "replications (overrides 'reps')")->check(CLI::PositiveNumber);
    sub->add_option("--dt", dt, "time step (overrides grid.dt)")->check(CLI::PositiveNumber);
    sub->add_option("--actions", actions, "action grid size (overrides grid.n_actions)")->check(CLI::Range(2, 100000));
    sub->add_option("--n-opt", n_opt, "CE re-optimizations (overrides simulate.n_opt)")->check(CLI::NonNegativeNumber);
  }
  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = cbp::load_config(config_path);
    cfg.command = cbp::parse_command(app.get_subcommands().front()->get_name());
    if (out_dir) cfg.out_dir = *out_dir;
    if (seed) cfg.seed = *seed;
    if (reps) cfg.reps = *reps;
    if (dt) cfg.dt = *dt;
    if (actions) cfg.n_actions = *actions;
    if (n_opt) cfg.simulate.n_opt = *n_opt;
    const auto report = cbp::run_experiment(cfg, std::cout);
    for (const auto& f : report.outputs) std::cout << "wrote " << cfg.out_dir << "/" << f << "\n";
  } catch (const cbp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == cbp::Errc::ConfigError ? 2 : 1;
  }
  return 0;
}
