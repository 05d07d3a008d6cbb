#pragma once

// Subcommands of the so3agg executable. Each returns a process exit code and writes its report to
// out and its diagnostics to err.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace so3agg {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitSimulation = 3,
  kExitPostprocess = 4,
};

struct CommonOptions {
  std::optional<std::string> config_path;
  std::optional<std::string> preset;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
};

/// Writes diagnostics.csv, trajectory.csv and summary.json into the output directory.
int cmd_simulate(const CommonOptions& opts, std::ostream& out, std::ostream& err);

/// One run per value in <output-dir>/<name>_<value>/, run concurrently, and sweep_summary.csv
/// with the time at which the diameter first drops below threshold.
int cmd_sweep(const CommonOptions& opts, const std::string& param,
              const std::vector<std::string>& values, double threshold, std::ostream& out,
              std::ostream& err);

/// Karcher mean of the final-time rows of a trajectory or state CSV, as JSON on out.
int cmd_karcher(const std::string& csv_path, std::ostream& out, std::ostream& err);

/// Stability constants of the configured potential and r(eps, t) at t = 0, 0.1, 1, as JSON.
int cmd_constants(const CommonOptions& opts, double epsilon, std::ostream& out,
                  std::ostream& err);

/// W1 between the final-time states in two CSV files, 12 significant digits on out.
int cmd_w1(const std::string& path_a, const std::string& path_b, std::ostream& out,
           std::ostream& err);

}  // namespace so3agg
