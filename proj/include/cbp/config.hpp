#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cbp/model.hpp"
#include "cbp/multi.hpp"
#include "cbp/sim.hpp"

namespace cbp {

enum class Command { Solve, Structure, Tactical, Baseline, Simulate, Multi, Sweep };

std::string_view to_string(Command c);
/// Throws ConfigError for unknown names.
Command parse_command(std::string_view name);

struct TacticalOptions {
  std::optional<double> t_min;  ///< default 10 dt
  std::optional<double> t_max;  ///< default 10 xi / lambda
  double curve_step = 0.1;
};

struct StructureOptions {
  std::vector<double> lambdas;  ///< empty: the instance's own lambda
};

struct SimulateOptions {
  double prior_mean = 1.0;
  double prior_cv = 1.0;
  int n_opt = 0;
  OracleMode oracle = OracleMode::Analytic;
  bool escalate = false;
};

struct MultiOptions {
  std::vector<SystemSpec> systems;
  DemandPenaltyRate revenue;
};

struct SweepAxis {
  std::string key;
  std::vector<double> values;
};

struct SweepOptions {
  Command command = Command::Baseline;
  std::vector<SweepAxis> axes;
};

struct ExperimentConfig {
  Command command = Command::Solve;
  std::string source;  ///< config file path, or a label for in-memory text
  std::string text;    ///< raw config contents, hashed into the manifest

  ProblemInstance instance;
  std::optional<double> cp;  ///< set for two-level costs, so sweeps over xi can rebuild them
  std::optional<double> cu;
  std::optional<double> dt;
  std::optional<int> n_actions;
  ActionSet action_set = ActionSet::Automatic;

  std::string out_dir = ".";
  std::uint64_t seed = 1;
  int reps = 2000;

  TacticalOptions tactical;
  StructureOptions structure;
  SimulateOptions simulate;
  MultiOptions multi;
  SweepOptions sweep;
};

/// Parses a YAML experiment file. Unknown keys and malformed values throw
/// ConfigError naming the file, line and key.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text, const std::string& source);

/// Keys a sweep axis may name: lambda, xi, s_max, T, gamma (exponent of
/// f), nu (exponent of r), cp, cu.
const std::vector<std::string>& sweep_keys();
void apply_axis(ExperimentConfig& cfg, const std::string& key, double value);

/// Grid for the current instance: configured values, otherwise default_grid.
GridConfig resolve_grid(const ExperimentConfig& cfg);

/// FNV-1a over the config text and every field a flag can override.
std::uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace cbp
