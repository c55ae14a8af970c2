#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cbp/cli.hpp"

using namespace cbp;
namespace fs = std::filesystem;

namespace {

const std::string kInstance = R"(instance:
  lambda: 1
  xi: 10
  s_max: 1
  T: 15
  f: {family: power, exponent: 2}
  r: {family: power, exponent: 0.5}
  cost: {cp: 1, cu: 5}
)";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("cbp_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string config_error(const std::string& text) {
  try {
    parse_config(text, "exp.yaml");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ConfigError);
    return e.what();
  }
  return "";
}

ExperimentConfig quiet_run(ExperimentConfig cfg, Command cmd, const fs::path& dir) {
  cfg.command = cmd;
  cfg.out_dir = dir.string();
  std::ostringstream log;
  run_experiment(cfg, log);
  return cfg;
}

}  // namespace

TEST_CASE("instance keys are read") {
  const auto cfg = parse_config(kInstance + "grid: {dt: 0.01, n_actions: 51, action_set: full}\nseed: 9\n", "exp.yaml");
  CHECK(cfg.instance.lambda == 1.0);
  CHECK(cfg.instance.xi == 10);
  CHECK(cfg.instance.horizon == 15.0);
  CHECK(cfg.instance.f.as_power()->exponent == 2.0);
  CHECK(cfg.instance.cost(10) == 5.0);
  CHECK(cfg.instance.cost(9) == 1.0);
  CHECK(*cfg.dt == 0.01);
  CHECK(*cfg.n_actions == 51);
  CHECK(cfg.action_set == ActionSet::Full);
  CHECK(cfg.seed == 9);
  const auto g = resolve_grid(cfg);
  CHECK(g.dt == 0.01);
  CHECK(g.n_actions == 51);

  const auto dp = parse_config(R"(instance:
  lambda: 1
  xi: 3
  s_max: 2
  T: 4
  f: {exponent: 1}
  r: {family: demand_penalty, b: 0.5, p: 2, D: 1}
  cost: {levels: [1, 1.5, 2.5, 6]}
)", "x");
  const auto* r = dp.instance.r.as_demand_penalty();
  REQUIRE(r != nullptr);
  CHECK(r->bonus == 0.5);
  CHECK(r->penalty == 2.0);
  CHECK(r->demand == 1.0);
  CHECK(dp.instance.cost(3) == 6.0);
  CHECK_FALSE(dp.cp.has_value());
}

TEST_CASE("diagnostics name the line and key") {
  auto msg = config_error(kInstance + "  colour: red\n");
  CHECK(msg.find("exp.yaml:9") != std::string::npos);
  CHECK(msg.find("instance.colour") != std::string::npos);

  msg = config_error("instance:\n  lambda: fast\n");
  CHECK(msg.find("exp.yaml:2") != std::string::npos);
  CHECK(msg.find("instance.lambda") != std::string::npos);

  msg = config_error("instance:\n  lambda: 1\n  xi: 3\n  s_max: 1\n  T: 1\n  r: {exponent: 1}\n  cost: {cp: 1, cu: 2}\n");
  CHECK(msg.find("instance.f") != std::string::npos);
  CHECK(msg.find("missing") != std::string::npos);

  msg = config_error(kInstance + "sweep:\n  axes:\n    colour: [1, 2]\n");
  CHECK(msg.find("exp.yaml:11") != std::string::npos);
  CHECK(msg.find("sweep.axes.colour") != std::string::npos);

  msg = config_error(kInstance + "grid:\n  action_set: some\n");
  CHECK(msg.find("grid.action_set") != std::string::npos);

  msg = config_error("instance: [1, 2\n");
  CHECK(msg.find("exp.yaml:") != std::string::npos);

  CHECK_THROWS_AS(load_config("/nonexistent/exp.yaml"), Error);
}

TEST_CASE("sweep axes rebuild the instance") {
  auto cfg = parse_config(kInstance, "exp.yaml");
  apply_axis(cfg, "xi", 14);
  CHECK(cfg.instance.xi == 14);
  CHECK(cfg.instance.cost(14) == 5.0);
  CHECK(cfg.instance.cost(13) == 1.0);
  apply_axis(cfg, "cp", 2);
  CHECK(cfg.instance.cost(0) == 2.0);
  apply_axis(cfg, "gamma", 1.5);
  CHECK(cfg.instance.f.as_power()->exponent == 1.5);
  apply_axis(cfg, "T", 7);
  CHECK(cfg.instance.horizon == 7.0);
  CHECK_THROWS_AS(apply_axis(cfg, "colour", 1), Error);

  const auto lv = std::string(kInstance).replace(kInstance.find("{cp: 1, cu: 5}"), 14, "{levels: [1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 5]}");
  const auto msg = config_error(lv + "sweep:\n  axes:\n    xi: [8, 10]\n");
  CHECK(msg.find("sweep.axes.xi") != std::string::npos);
}

TEST_CASE("every shipped config parses") {
  int n = 0;
  for (const auto& e : fs::directory_iterator(fs::path(CBP_SOURCE_DIR) / "configs")) {
    if (e.path().extension() != ".yaml") continue;
    INFO(e.path().string());
    CHECK_NOTHROW(load_config(e.path().string()));
    ++n;
  }
  CHECK(n >= 8);
}

TEST_CASE("identical runs write identical files") {
  const auto cfg = parse_config(kInstance + "tactical: {t_min: 0.5, t_max: 12}\n", "exp.yaml");
  for (Command cmd : {Command::Solve, Command::Tactical, Command::Baseline, Command::Structure}) {
    const auto a = scratch("idem_a");
    const auto b = scratch("idem_b");
    quiet_run(cfg, cmd, a);
    quiet_run(cfg, cmd, b);
    int files = 0;
    for (const auto& e : fs::directory_iterator(a)) {
      INFO(e.path().filename().string());
      if (e.path().filename() == "manifest.json") {
        auto ma = nlohmann::json::parse(slurp(e.path()));
        auto mb = nlohmann::json::parse(slurp(b / "manifest.json"));
        ma.erase("created");
        mb.erase("created");
        CHECK(ma.dump() == mb.dump());
        continue;
      }
      CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
      ++files;
    }
    CHECK(files >= 1);
  }
}

TEST_CASE("simulation output depends only on config and seed") {
  auto cfg = parse_config(kInstance + "simulate: {prior: {mean: 1, cv: 0.5}, n_opt: 1}\nreps: 20\nseed: 5\n",
                          "exp.yaml");
  const auto a = scratch("sim_a");
  const auto b = scratch("sim_b");
  quiet_run(cfg, Command::Simulate, a);
  quiet_run(cfg, Command::Simulate, b);
  CHECK(slurp(a / "replications.csv") == slurp(b / "replications.csv"));
  CHECK(slurp(a / "regret.csv") == slurp(b / "regret.csv"));
  cfg.seed = 6;
  const auto c = scratch("sim_c");
  quiet_run(cfg, Command::Simulate, c);
  CHECK(slurp(a / "replications.csv") != slurp(c / "replications.csv"));
}

TEST_CASE("manifest records hash, seed, grid and outputs") {
  auto cfg = parse_config(kInstance, "exp.yaml");
  const auto dir = scratch("manifest");
  quiet_run(cfg, Command::Solve, dir);
  const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(m["command"] == "solve");
  CHECK(m["seed"] == 1);
  CHECK(m["grid"]["dt"] == 0.005);
  CHECK(m["grid"]["n_actions"] == 101);
  CHECK(m["outputs"][0] == "solution.csv");
  CHECK(m["version"].get<std::string>().size() > 0);
  CHECK(m["config_hash"].get<std::string>().size() == 16);

  const auto h = config_hash(cfg);
  cfg.seed = 2;
  CHECK(config_hash(cfg) != h);
  cfg.seed = 1;
  cfg.dt = 0.01;
  CHECK(config_hash(cfg) != h);
}

TEST_CASE("tactical command emits the average-profit curve") {
  const auto cfg = parse_config(kInstance + "tactical: {t_min: 0.5, t_max: 30, curve_step: 0.1}\n", "exp.yaml");
  const auto dir = scratch("tactical");
  quiet_run(cfg, Command::Tactical, dir);
  std::istringstream curve(slurp(dir / "curve.csv"));
  std::string line;
  std::getline(curve, line);
  CHECK(line == "T,g");
  double best_t = 0.0;
  double best_g = -1e300;
  int rows = 0;
  while (std::getline(curve, line)) {
    const auto comma = line.find(',');
    const double t = std::stod(line.substr(0, comma));
    const double g = std::stod(line.substr(comma + 1));
    if (g > best_g) {
      best_g = g;
      best_t = t;
    }
    ++rows;
  }
  CHECK(rows > 250);
  std::istringstream summary(slurp(dir / "tactical.csv"));
  std::getline(summary, line);
  CHECK(line == "t_star,g_star,boundary_hit,t_sequential,p_integrated,p_sequential,R_hat");
  std::getline(summary, line);
  const double t_star = std::stod(line.substr(0, line.find(',')));
  CHECK(best_t == doctest::Approx(t_star));
  CHECK(std::abs(best_g - 0.84) <= 0.02);
}

TEST_CASE("sweep resumes after the last complete row") {
  auto cfg = parse_config(kInstance + "sweep:\n  command: baseline\n  axes:\n    lambda: [0.5, 1]\n    xi: [8, 10]\n",
                          "exp.yaml");
  const auto dir = scratch("sweep");
  quiet_run(cfg, Command::Sweep, dir);
  const auto full = slurp(dir / "sweep.csv");
  CHECK(full.rfind(sweep_header(cfg) + "\n", 0) == 0);
  CHECK(std::count(full.begin(), full.end(), '\n') == 5);
  CHECK(full.find("0.5,8,") != std::string::npos);
  CHECK(full.find(",ok\n") != std::string::npos);

  // Two complete rows and a torn third.
  std::size_t cut = 0;
  for (int i = 0; i < 3; ++i) cut = full.find('\n', cut) + 1;
  {
    std::ofstream out(dir / "sweep.csv", std::ios::binary | std::ios::trunc);
    out << full.substr(0, cut) << "1,8,0.3";
  }
  std::ostringstream log;
  cfg.command = Command::Sweep;
  cfg.out_dir = dir.string();
  run_experiment(cfg, log);
  CHECK(log.str().find("resuming sweep after 2 of 4 points") != std::string::npos);
  CHECK(slurp(dir / "sweep.csv") == full);
}

TEST_CASE("failing sweep points are recorded, not fatal") {
  auto cfg = parse_config(kInstance + "sweep:\n  command: baseline\n  axes:\n    cu: [0.5, 5]\n", "exp.yaml");
  const auto dir = scratch("sweep_err");
  quiet_run(cfg, Command::Sweep, dir);
  const auto out = slurp(dir / "sweep.csv");
  CHECK(out.find("0.5,,,,,NonIncreasingCost\n") != std::string::npos);
  CHECK(out.find("5,") != std::string::npos);
}

TEST_CASE("module errors propagate from single runs") {
  auto cfg = parse_config(kInstance, "exp.yaml");
  cfg.instance.cost = CostFunction::two_level(10, 5.0, 1.0);
  CHECK_THROWS_AS(quiet_run(cfg, Command::Solve, scratch("err")), Error);
  auto multi = parse_config(kInstance, "exp.yaml");
  CHECK_THROWS_AS(quiet_run(multi, Command::Multi, scratch("err2")), Error);
}
