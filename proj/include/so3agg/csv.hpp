#pragma once

// CSV artifacts: diagnostics, trajectories and particle states. Floats are written with 17
// significant digits.

#include <stdexcept>
#include <string>
#include <vector>

#include "so3agg/dynamics.hpp"

namespace so3agg {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kDiagnosticsHeader =
    "t,energy,dissipation,diameter,min_trace,max_dist_to_center";
inline constexpr const char* kTrajectoryHeader = "t,particle_id,theta,ax,ay,az";

std::string format_csv_double(double x);

void write_diagnostics(const std::string& path, const std::vector<DiagnosticsRecord>& records);
void write_trajectory(const std::string& path, const std::vector<ParticleState>& snapshots);

/// Reads a particle state from a CSV with columns theta, ax, ay, az (any order, extra columns
/// ignored). With a t column only the rows at the largest t are used; with a mass column the
/// masses are taken from it, otherwise they are uniform. Throws CsvError naming line and column.
ParticleState read_state_csv(const std::string& path);

}  // namespace so3agg
