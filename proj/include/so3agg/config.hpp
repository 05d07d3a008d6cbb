#pragma once

// Experiment configuration: a flat "key = value" text format with dotted keys, named presets and
// command-line overrides, merged in the order defaults < preset < file < overrides.

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "so3agg/dynamics.hpp"

namespace so3agg {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A single key = value assignment and where it came from ("file:3:9", "--set", "preset ...").
struct ConfigEntry {
  std::string key;
  std::string value;
  std::string origin;
};

using ConfigEntries = std::vector<ConfigEntry>;

struct ExperimentConfig {
  SimConfig sim;
  /// init.center as written (theta, ax, ay, az), kept verbatim so the echo replays exactly.
  std::array<double, 4> init_center{0.0, 1.0, 0.0, 0.0};
  std::string output_dir = "out";
  std::optional<std::string> preset;
};

/// Parses the text format. '#' starts a comment; blank lines are ignored. Throws ConfigError
/// naming the source, line and column on malformed lines.
ConfigEntries parse_config_text(const std::string& text, const std::string& source);

/// Reads a config file. A ".json" file is read as a summary.json and its "config" echo is used,
/// so a run can be replayed from its own summary. Throws ConfigError when the file is missing.
ConfigEntries load_config_file(const std::string& path);

/// "key=value" as given to --set.
ConfigEntry parse_override(const std::string& assignment);

std::vector<std::string> preset_names();
/// Throws ConfigError for unknown names.
ConfigEntries preset_entries(const std::string& name);

/// Keys understood by the format, in echo order.
const std::vector<std::string>& config_keys();
/// Expands a short key such as "q" or "dt" to its dotted form; returns the input if unknown.
std::string canonical_key(const std::string& key);

/// Merges entries over the defaults; a "preset" entry in any layer is expanded first, below the
/// layer that names it. Validates the result. Throws ConfigError naming the offending origin.
ExperimentConfig build_config(const std::vector<ConfigEntries>& layers);

/// Every key with its resolved value; doubles in shortest round-trip form.
std::map<std::string, std::string> echo(const ExperimentConfig& config);

/// Shortest decimal that reads back to the same double.
std::string format_double(double x);

}  // namespace so3agg
