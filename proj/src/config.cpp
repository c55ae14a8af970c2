#include "cbp/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

namespace cbp {

std::string_view to_string(Command c) {
  switch (c) {
    case Command::Solve: return "solve";
    case Command::Structure: return "structure";
    case Command::Tactical: return "tactical";
    case Command::Baseline: return "baseline";
    case Command::Simulate: return "simulate";
    case Command::Multi: return "multi";
    case Command::Sweep: return "sweep";
  }
  return "?";
}

Command parse_command(std::string_view name) {
  for (Command c : {Command::Solve, Command::Structure, Command::Tactical, Command::Baseline, Command::Simulate,
                    Command::Multi, Command::Sweep}) {
    if (to_string(c) == name) return c;
  }
  throw Error(Errc::ConfigError, fmt::format("unknown command '{}'", name));
}

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& key, const std::string& what) const {
    const int line = node.Mark().line >= 0 ? node.Mark().line + 1 : 0;
    throw Error(Errc::ConfigError, fmt::format("{}:{}: key '{}': {}", source_, line, key, what));
  }

  void expect_map(const YAML::Node& node, const std::string& key, std::initializer_list<std::string_view> allowed) const {
    if (!node.IsMap()) fail(node, key, "expected a mapping");
    for (const auto& kv : node) {
      const auto name = kv.first.as<std::string>();
      if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
        fail(kv.first, join(key, name), "unknown key");
      }
    }
  }

  template <class T>
  T get(const YAML::Node& node, const std::string& key) const {
    if (!node.IsScalar()) fail(node, key, "expected a scalar");
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, key, fmt::format("cannot read '{}' as {}", node.Scalar(), type_name<T>()));
    }
  }

  template <class T>
  std::optional<T> opt(const YAML::Node& parent, const std::string& parent_key, const char* name) const {
    const auto n = parent[name];
    if (!n) return std::nullopt;
    return get<T>(n, join(parent_key, name));
  }

  std::vector<double> list(const YAML::Node& node, const std::string& key) const {
    if (!node.IsSequence()) fail(node, key, "expected a list");
    std::vector<double> out;
    for (std::size_t i = 0; i < node.size(); ++i) out.push_back(get<double>(node[i], fmt::format("{}[{}]", key, i)));
    return out;
  }

  static std::string join(const std::string& a, std::string_view b) {
    return a.empty() ? std::string(b) : a + "." + std::string(b);
  }

 private:
  template <class T>
  static const char* type_name() {
    if constexpr (std::is_same_v<T, double>) return "a number";
    else if constexpr (std::is_same_v<T, int>) return "an integer";
    else if constexpr (std::is_same_v<T, bool>) return "a boolean";
    else if constexpr (std::is_same_v<T, std::uint64_t>) return "an unsigned integer";
    else return "a string";
  }

  std::string source_;
};

RateFunction read_rate(const Reader& rd, const YAML::Node& node, const std::string& key) {
  rd.expect_map(node, key, {"family", "coeff", "exponent", "b", "p", "D"});
  const auto type = rd.opt<std::string>(node, key, "family").value_or("power");
  if (type == "power") {
    for (const char* k : {"b", "p", "D"}) {
      if (node[k]) rd.fail(node[k], Reader::join(key, k), "not a power-function parameter");
    }
    const auto exponent = rd.opt<double>(node, key, "exponent");
    if (!exponent) rd.fail(node, Reader::join(key, "exponent"), "missing");
    return RateFunction::power(rd.opt<double>(node, key, "coeff").value_or(1.0), *exponent);
  }
  if (type == "demand_penalty") {
    for (const char* k : {"coeff", "exponent"}) {
      if (node[k]) rd.fail(node[k], Reader::join(key, k), "not a demand-penalty parameter");
    }
    const auto demand = rd.opt<double>(node, key, "D");
    if (!demand) rd.fail(node, Reader::join(key, "D"), "missing");
    return RateFunction::demand_penalty(rd.opt<double>(node, key, "b").value_or(0.0),
                                        rd.opt<double>(node, key, "p").value_or(1.0), *demand);
  }
  rd.fail(node["family"], Reader::join(key, "family"), fmt::format("unknown rate family '{}'", type));
}

template <class T>
T required(const Reader& rd, const YAML::Node& parent, const std::string& key, const char* name) {
  const auto v = rd.opt<T>(parent, key, name);
  if (!v) rd.fail(parent, Reader::join(key, name), "missing");
  return *v;
}

void read_instance(const Reader& rd, const YAML::Node& node, ExperimentConfig& cfg, bool need_rates) {
  const std::string key = "instance";
  rd.expect_map(node, key, {"lambda", "xi", "s_max", "T", "f", "r", "cost"});
  auto& inst = cfg.instance;
  if (need_rates) inst.lambda = required<double>(rd, node, key, "lambda");
  else inst.lambda = rd.opt<double>(node, key, "lambda").value_or(inst.lambda);
  inst.xi = required<int>(rd, node, key, "xi");
  inst.s_max = required<double>(rd, node, key, "s_max");
  inst.horizon = required<double>(rd, node, key, "T");
  for (const char* k : {"f", "r"}) {
    if (node[k]) {
      (k[0] == 'f' ? inst.f : inst.r) = read_rate(rd, node[k], Reader::join(key, k));
    } else if (need_rates) {
      rd.fail(node, Reader::join(key, k), "missing");
    }
  }
  const auto cost = node["cost"];
  if (!cost) rd.fail(node, "instance.cost", "missing");
  rd.expect_map(cost, "instance.cost", {"cp", "cu", "levels"});
  if (cost["levels"]) {
    if (cost["cp"] || cost["cu"]) rd.fail(cost, "instance.cost", "give either levels or cp/cu, not both");
    inst.cost = CostFunction(rd.list(cost["levels"], "instance.cost.levels"));
  } else {
    cfg.cp = required<double>(rd, cost, "instance.cost", "cp");
    cfg.cu = required<double>(rd, cost, "instance.cost", "cu");
    if (inst.xi < 1) rd.fail(node["xi"], "instance.xi", "must be >= 1");
    inst.cost = CostFunction::two_level(inst.xi, *cfg.cp, *cfg.cu);
  }
}

void read_multi(const Reader& rd, const YAML::Node& node, ExperimentConfig& cfg) {
  rd.expect_map(node, "multi", {"systems", "revenue"});
  const auto systems = node["systems"];
  if (!systems || !systems.IsSequence()) rd.fail(node, "multi.systems", "expected a list of systems");
  for (std::size_t i = 0; i < systems.size(); ++i) {
    const auto key = fmt::format("multi.systems[{}]", i);
    rd.expect_map(systems[i], key, {"lambda", "f"});
    SystemSpec spec;
    spec.lambda = required<double>(rd, systems[i], key, "lambda");
    if (!systems[i]["f"]) rd.fail(systems[i], key + ".f", "missing");
    spec.f = read_rate(rd, systems[i]["f"], key + ".f");
    cfg.multi.systems.push_back(spec);
  }
  const auto rev = node["revenue"];
  if (!rev) rd.fail(node, "multi.revenue", "missing");
  rd.expect_map(rev, "multi.revenue", {"b", "p", "D"});
  cfg.multi.revenue.bonus = rd.opt<double>(rev, "multi.revenue", "b").value_or(0.0);
  cfg.multi.revenue.penalty = rd.opt<double>(rev, "multi.revenue", "p").value_or(1.0);
  cfg.multi.revenue.demand = required<double>(rd, rev, "multi.revenue", "D");
}

}  // namespace

const std::vector<std::string>& sweep_keys() {
  static const std::vector<std::string> keys = {"lambda", "xi", "s_max", "T", "gamma", "nu", "cp", "cu"};
  return keys;
}

void apply_axis(ExperimentConfig& cfg, const std::string& key, double value) {
  auto& inst = cfg.instance;
  auto set_exponent = [&](RateFunction& fn, const char* name) {
    const auto* p = fn.as_power();
    if (!p) throw Error(Errc::ConfigError, fmt::format("sweep axis '{}' needs a power-function {}", key, name));
    fn = RateFunction::power(p->coeff, value);
  };
  auto rebuild_cost = [&] {
    if (!cfg.cp || !cfg.cu) {
      throw Error(Errc::ConfigError, fmt::format("sweep axis '{}' needs a cost given as cp/cu", key));
    }
    inst.cost = CostFunction::two_level(inst.xi, *cfg.cp, *cfg.cu);
  };
  if (key == "lambda") {
    inst.lambda = value;
  } else if (key == "xi") {
    if (value != std::floor(value) || value < 1) throw Error(Errc::ConfigError, "sweep axis 'xi' needs integers >= 1");
    inst.xi = static_cast<int>(value);
    rebuild_cost();
  } else if (key == "s_max") {
    inst.s_max = value;
  } else if (key == "T") {
    inst.horizon = value;
  } else if (key == "gamma") {
    set_exponent(inst.f, "f");
  } else if (key == "nu") {
    set_exponent(inst.r, "r");
  } else if (key == "cp") {
    cfg.cp = value;
    rebuild_cost();
  } else if (key == "cu") {
    cfg.cu = value;
    rebuild_cost();
  } else {
    throw Error(Errc::ConfigError, fmt::format("unknown sweep axis '{}'", key));
  }
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  const Reader rd(source);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw Error(Errc::ConfigError, fmt::format("{}:{}: {}", source, e.mark.line + 1, e.msg));
  }
  ExperimentConfig cfg;
  cfg.source = source;
  cfg.text = text;
  rd.expect_map(root, "", {"command", "instance", "grid", "seed", "reps", "out", "tactical", "structure", "simulate",
                           "multi", "sweep"});
  if (auto c = rd.opt<std::string>(root, "", "command")) {
    try {
      cfg.command = parse_command(*c);
    } catch (const Error&) {
      rd.fail(root["command"], "command", fmt::format("unknown command '{}'", *c));
    }
  }
  if (!root["instance"]) rd.fail(root, "instance", "missing");
  read_instance(rd, root["instance"], cfg, !root["multi"]);

  if (const auto g = root["grid"]) {
    rd.expect_map(g, "grid", {"dt", "n_actions", "action_set"});
    cfg.dt = rd.opt<double>(g, "grid", "dt");
    cfg.n_actions = rd.opt<int>(g, "grid", "n_actions");
    if (auto set = rd.opt<std::string>(g, "grid", "action_set")) {
      if (*set == "automatic") cfg.action_set = ActionSet::Automatic;
      else if (*set == "full") cfg.action_set = ActionSet::Full;
      else if (*set == "bang_bang") cfg.action_set = ActionSet::BangBang;
      else rd.fail(g["action_set"], "grid.action_set", "expected automatic, full or bang_bang");
    }
  }
  cfg.seed = rd.opt<std::uint64_t>(root, "", "seed").value_or(cfg.seed);
  cfg.reps = rd.opt<int>(root, "", "reps").value_or(cfg.reps);
  cfg.out_dir = rd.opt<std::string>(root, "", "out").value_or(cfg.out_dir);

  if (const auto t = root["tactical"]) {
    rd.expect_map(t, "tactical", {"t_min", "t_max", "curve_step"});
    cfg.tactical.t_min = rd.opt<double>(t, "tactical", "t_min");
    cfg.tactical.t_max = rd.opt<double>(t, "tactical", "t_max");
    cfg.tactical.curve_step = rd.opt<double>(t, "tactical", "curve_step").value_or(cfg.tactical.curve_step);
  }
  if (const auto s = root["structure"]) {
    rd.expect_map(s, "structure", {"lambdas"});
    if (s["lambdas"]) cfg.structure.lambdas = rd.list(s["lambdas"], "structure.lambdas");
  }
  if (const auto s = root["simulate"]) {
    rd.expect_map(s, "simulate", {"prior", "n_opt", "oracle", "escalate"});
    if (const auto p = s["prior"]) {
      rd.expect_map(p, "simulate.prior", {"mean", "cv"});
      cfg.simulate.prior_mean = rd.opt<double>(p, "simulate.prior", "mean").value_or(cfg.simulate.prior_mean);
      cfg.simulate.prior_cv = rd.opt<double>(p, "simulate.prior", "cv").value_or(cfg.simulate.prior_cv);
    }
    cfg.simulate.n_opt = rd.opt<int>(s, "simulate", "n_opt").value_or(0);
    if (auto o = rd.opt<std::string>(s, "simulate", "oracle")) {
      if (*o == "analytic") cfg.simulate.oracle = OracleMode::Analytic;
      else if (*o == "simulated") cfg.simulate.oracle = OracleMode::Simulated;
      else rd.fail(s["oracle"], "simulate.oracle", "expected analytic or simulated");
    }
    cfg.simulate.escalate = rd.opt<bool>(s, "simulate", "escalate").value_or(false);
  }
  if (const auto m = root["multi"]) read_multi(rd, m, cfg);
  if (const auto s = root["sweep"]) {
    rd.expect_map(s, "sweep", {"command", "axes"});
    if (auto c = rd.opt<std::string>(s, "sweep", "command")) {
      if (*c == "sweep" || *c == "multi") rd.fail(s["command"], "sweep.command", "cannot sweep this command");
      try {
        cfg.sweep.command = parse_command(*c);
      } catch (const Error&) {
        rd.fail(s["command"], "sweep.command", fmt::format("unknown command '{}'", *c));
      }
    }
    const auto axes = s["axes"];
    if (!axes) rd.fail(s, "sweep.axes", "missing");
    if (!axes.IsMap()) rd.fail(axes, "sweep.axes", "expected a mapping from key to value list");
    for (const auto& kv : axes) {
      const auto name = kv.first.as<std::string>();
      const auto key = "sweep.axes." + name;
      if (std::find(sweep_keys().begin(), sweep_keys().end(), name) == sweep_keys().end()) {
        rd.fail(kv.first, key, fmt::format("not a sweepable key (allowed: {})", fmt::join(sweep_keys(), ", ")));
      }
      if ((name == "xi" || name == "cp" || name == "cu") && !cfg.cp) {
        rd.fail(kv.first, key, "sweeping this key needs instance.cost given as cp/cu");
      }
      auto values = rd.list(kv.second, key);
      if (values.empty()) rd.fail(kv.second, key, "empty value list");
      cfg.sweep.axes.push_back({name, std::move(values)});
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ConfigError, fmt::format("cannot open config file '{}'", path));
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path);
}

GridConfig resolve_grid(const ExperimentConfig& cfg) {
  GridConfig g = default_grid(cfg.instance);
  if (cfg.dt) g.dt = *cfg.dt;
  if (cfg.n_actions) g.n_actions = *cfg.n_actions;
  g.action_set = cfg.action_set;
  return g;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  feed(cfg.text);
  feed(fmt::format("|command={}|seed={}|reps={}|n_opt={}|dt={}|actions={}", to_string(cfg.command), cfg.seed, cfg.reps, cfg.simulate.n_opt,
                   cfg.dt ? fmt::format("{:.17g}", *cfg.dt) : "default",
                   cfg.n_actions ? std::to_string(*cfg.n_actions) : "default"));
  return h;
}

}  // namespace cbp
