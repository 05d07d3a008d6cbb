#include "so3agg/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace so3agg {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CsvError("cannot write '" + path + "'");
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string strip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && s[b] == ' ') ++b;
  return s.substr(b);
}

}  // namespace

std::string format_csv_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_diagnostics(const std::string& path, const std::vector<DiagnosticsRecord>& records) {
  std::ofstream out = open_out(path);
  out << kDiagnosticsHeader << '\n';
  for (const DiagnosticsRecord& r : records) {
    out << format_csv_double(r.time) << ',' << format_csv_double(r.energy) << ','
        << format_csv_double(r.dissipation) << ',' << format_csv_double(r.diameter) << ','
        << format_csv_double(r.min_trace) << ',' << format_csv_double(r.max_dist_to_center)
        << '\n';
  }
}

void write_trajectory(const std::string& path, const std::vector<ParticleState>& snapshots) {
  std::ofstream out = open_out(path);
  out << kTrajectoryHeader << '\n';
  for (const ParticleState& s : snapshots) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      const AxisAngle aa = to_axis_angle(s.rotations[i]);
      out << format_csv_double(s.time) << ',' << i << ',' << format_csv_double(aa.theta) << ','
          << format_csv_double(aa.axis.x()) << ',' << format_csv_double(aa.axis.y()) << ','
          << format_csv_double(aa.axis.z()) << '\n';
    }
  }
}

ParticleState read_state_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw CsvError(path + ": empty file");

  std::map<std::string, std::size_t> col;
  const std::vector<std::string> header = split(line);
  for (std::size_t c = 0; c < header.size(); ++c) col[strip(header[c])] = c;
  for (const char* need : {"theta", "ax", "ay", "az"}) {
    if (!col.count(need)) throw CsvError(path + ":1: missing column '" + need + "'");
  }
  const auto opt = [&](const char* name) -> std::optional<std::size_t> {
    const auto it = col.find(name);
    return it == col.end() ? std::nullopt : std::optional<std::size_t>(it->second);
  };
  const auto t_col = opt("t");
  const auto m_col = opt("mass");

  struct Row {
    double t, theta, ax, ay, az, mass;
  };
  std::vector<Row> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (strip(line).empty()) continue;
    const std::vector<std::string> cells = split(line);
    const auto num = [&](std::size_t c) {
      if (c >= cells.size()) {
        throw CsvError(path + ":" + std::to_string(lineno) + ":" + std::to_string(c + 1) +
                       ": missing field");
      }
      const std::string s = strip(cells[c]);
      double x = 0.0;
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
      if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(x)) {
        throw CsvError(path + ":" + std::to_string(lineno) + ":" + std::to_string(c + 1) +
                       ": not a number: '" + s + "'");
      }
      return x;
    };
    rows.push_back({t_col ? num(*t_col) : 0.0, num(col["theta"]), num(col["ax"]), num(col["ay"]),
                    num(col["az"]), m_col ? num(*m_col) : 1.0});
  }
  if (rows.empty()) throw CsvError(path + ": no data rows");

  double t_last = rows.front().t;
  for (const Row& r : rows) t_last = std::max(t_last, r.t);

  std::vector<Rotation> rotations;
  std::vector<double> masses;
  for (const Row& r : rows) {
    if (r.t != t_last) continue;
    try {
      rotations.push_back(exp_axis_angle(AxisAngle::make(r.theta, Vec3(r.ax, r.ay, r.az))));
    } catch (const DomainError& e) {
      throw CsvError(path + ": " + e.what());
    }
    masses.push_back(r.mass);
  }
  ParticleState state;
  state.time = t_last;
  state.rotations = std::move(rotations);
  if (m_col) {
    state.masses = std::move(masses);
  } else {
    state.masses.assign(state.rotations.size(), 1.0 / static_cast<double>(state.rotations.size()));
  }
  try {
    state.validate();
  } catch (const DomainError& e) {
    throw CsvError(path + ": " + e.what());
  }
  return state;
}

}  // namespace so3agg
