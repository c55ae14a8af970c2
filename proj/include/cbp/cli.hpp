#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cbp/config.hpp"

namespace cbp {

struct RunReport {
  std::vector<std::string> outputs;  ///< file names relative to the output directory
  GridConfig grid;
};

/// Runs cfg.command, writes its CSV files and manifest.json into cfg.out_dir
/// and prints a short summary to `log`. Module failures propagate as Error.
///
/// Outputs by command:
///   solve      solution.csv
///   structure  structure.csv, switching_curve.csv (bang-bang solutions only)
///   tactical   curve.csv, tactical.csv
///   baseline   baseline.csv
///   simulate   replications.csv, regret.csv
///   multi      multi.csv
///   sweep      sweep.csv, one row per grid point, appended as each finishes;
///              a rerun resumes after the last complete row.
RunReport run_experiment(const ExperimentConfig& cfg, std::ostream& log);

/// Header of sweep.csv for the given config.
std::string sweep_header(const ExperimentConfig& cfg);

}  // namespace cbp
