#include "so3agg/commands.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <mutex>
#include <ostream>
#include <thread>

#include "so3agg/config.hpp"
#include "so3agg/csv.hpp"
#include "so3agg/transport.hpp"

namespace so3agg {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kSweepable = {
    "potential.q",     "potential.p",  "potential.C",        "potential.l",
    "potential.s_exp", "sim.dt",       "sim.steps",          "sim.seed",
    "sim.particles",   "sim.integrator", "sim.consensus_tol", "init.radius",
};

ExperimentConfig resolve(const CommonOptions& opts, const ConfigEntries& extra = {}) {
  std::vector<ConfigEntries> layers;
  if (opts.preset) layers.push_back({{"preset", *opts.preset, "--preset"}});
  if (opts.config_path) layers.push_back(load_config_file(*opts.config_path));
  ConfigEntries sets;
  for (const std::string& s : opts.sets) sets.push_back(parse_override(s));
  layers.push_back(sets);
  ConfigEntries flags;
  if (opts.seed) flags.push_back({"sim.seed", std::to_string(*opts.seed), "--seed"});
  if (opts.output_dir) flags.push_back({"output.dir", *opts.output_dir, "--output-dir"});
  layers.push_back(flags);
  layers.push_back(extra);
  return build_config(layers);
}

struct Outcome {
  int code = kExitOk;
  std::string message;
  RunResult result;
};

// Runs one simulation and writes its artifacts. Never throws.
Outcome simulate_into(const ExperimentConfig& cfg) {
  Outcome o;
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) {
    o.code = kExitConfig;
    o.message = "cannot create output directory '" + cfg.output_dir + "': " + ec.message();
    return o;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    o.result = run(cfg.sim);
  } catch (const StepError& e) {
    o.code = kExitSimulation;
    o.message = std::string("simulation error at ") + e.what();
    return o;
  } catch (const std::exception& e) {
    o.code = kExitSimulation;
    o.message = std::string("simulation error: ") + e.what();
    return o;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  try {
    const fs::path dir(cfg.output_dir);
    write_diagnostics((dir / "diagnostics.csv").string(), o.result.diagnostics);
    write_trajectory((dir / "trajectory.csv").string(), o.result.trajectory);

    const DiagnosticsRecord& last = o.result.diagnostics.back();
    json summary;
    summary["final_diameter"] = last.diameter;
    summary["final_time"] = last.time;
    summary["consensus"] = o.result.status == RunStatus::kConsensus;
    summary["status"] = to_string(o.result.status);
    summary["steps_taken"] = o.result.steps_taken;
    summary["wall_time_s"] = wall;
    summary["seed"] = cfg.sim.seed;
    summary["config"] = echo(cfg);
    std::ofstream out(dir / "summary.json", std::ios::binary);
    if (!out) throw CsvError("cannot write summary.json in '" + cfg.output_dir + "'");
    out << summary.dump(2) << '\n';
  } catch (const std::exception& e) {
    o.code = kExitPostprocess;
    o.message = std::string("output error: ") + e.what();
  }
  return o;
}

std::string last_segment(const std::string& key) {
  const auto dot = key.rfind('.');
  return dot == std::string::npos ? key : key.substr(dot + 1);
}

}  // namespace

int cmd_simulate(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  try {
    cfg = resolve(opts);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  const Outcome o = simulate_into(cfg);
  if (o.code != kExitOk) {
    err << o.message << '\n';
    return o.code;
  }
  out << to_string(o.result.status) << " after " << o.result.steps_taken
      << " steps, final diameter " << format_csv_double(o.result.diagnostics.back().diameter)
      << ", output in " << cfg.output_dir << '\n';
  return kExitOk;
}

int cmd_sweep(const CommonOptions& opts, const std::string& param,
              const std::vector<std::string>& values, double threshold, std::ostream& out,
              std::ostream& err) {
  if (values.empty()) {
    err << "config error: sweep needs at least one value\n";
    return kExitConfig;
  }
  const std::string key = canonical_key(param);
  if (std::find(kSweepable.begin(), kSweepable.end(), key) == kSweepable.end()) {
    err << "config error: '" << param << "' is not a sweepable parameter\n";
    return kExitConfig;
  }
  if (!(threshold > 0.0)) {
    err << "config error: threshold must be positive\n";
    return kExitConfig;
  }

  std::string root;
  std::vector<ExperimentConfig> configs;
  try {
    root = resolve(opts).output_dir;
    for (const std::string& v : values) {
      const std::string sub = (fs::path(root) / (last_segment(key) + "_" + v)).string();
      configs.push_back(
          resolve(opts, {{key, v, "--values " + v}, {"output.dir", sub, "sweep directory"}}));
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  std::vector<Outcome> outcomes(configs.size());
  std::mutex io;
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      outcomes[i] = simulate_into(configs[i]);
      const std::lock_guard<std::mutex> lock(io);
      if (outcomes[i].code == kExitOk) {
        out << "[" << key << "=" << values[i] << "] " << to_string(outcomes[i].result.status)
            << " after " << outcomes[i].result.steps_taken << " steps" << std::endl;
      } else {
        err << "[" << key << "=" << values[i] << "] " << outcomes[i].message << std::endl;
      }
    }
  };
  const std::size_t workers =
      std::min<std::size_t>(configs.size(), std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  int code = kExitOk;
  try {
    fs::create_directories(root);
    std::ofstream csv(fs::path(root) / "sweep_summary.csv", std::ios::binary);
    if (!csv) throw CsvError("cannot write sweep_summary.csv in '" + root + "'");
    csv << "param,value,status,reached,time_to_threshold,final_time,final_diameter\n";
    for (std::size_t i = 0; i < configs.size(); ++i) {
      const Outcome& o = outcomes[i];
      csv << key << ',' << values[i] << ',';
      if (o.code != kExitOk) {
        csv << "error,0,,,\n";
        code = std::max(code, o.code);
        continue;
      }
      const auto hit = time_to_diameter(o.result.diagnostics, threshold);
      const DiagnosticsRecord& last = o.result.diagnostics.back();
      csv << to_string(o.result.status) << ',' << (hit ? 1 : 0) << ','
          << (hit ? format_csv_double(*hit) : "") << ',' << format_csv_double(last.time) << ','
          << format_csv_double(last.diameter) << '\n';
    }
  } catch (const std::exception& e) {
    err << "output error: " << e.what() << '\n';
    return kExitPostprocess;
  }
  return code;
}

int cmd_karcher(const std::string& csv_path, std::ostream& out, std::ostream& err) {
  ParticleState state;
  try {
    state = read_state_csv(csv_path);
  } catch (const CsvError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitConfig;
  }
  KarcherResult km;
  try {
    km = karcher_mean(state.rotations, state.masses);
  } catch (const std::exception& e) {
    err << "karcher mean failed: " << e.what() << '\n';
    return kExitPostprocess;
  }
  double mean = 0.0;
  double second = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    const double d = geodesic_distance(km.mean, state.rotations[i]);
    mean += state.masses[i] * d;
    second += state.masses[i] * d * d;
  }
  const AxisAngle c = to_axis_angle(km.mean);
  json j;
  j["center"] = {c.theta, c.axis.x(), c.axis.y(), c.axis.z()};
  j["mean_radius"] = mean;
  j["radius_std"] = std::sqrt(std::max(0.0, second - mean * mean));
  j["iterations"] = km.iterations;
  j["residual"] = km.residual;
  j["particles"] = state.size();
  j["time"] = state.time;
  out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_constants(const CommonOptions& opts, double epsilon, std::ostream& out,
                  std::ostream& err) {
  StabilityConstants k;
  ExperimentConfig cfg;
  try {
    cfg = resolve(opts);
    k = stability_constants(cfg.sim.potential, epsilon);
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  json j;
  json pot;
  for (const auto& [key, value] : echo(cfg)) {
    if (key.rfind("potential.", 0) == 0) pot[key.substr(10)] = value;
  }
  j["potential"] = pot;
  j["epsilon"] = k.epsilon;
  j["C_f"] = k.C_f;
  j["L_f"] = k.L_f;
  j["C_gp"] = k.C_gp;
  j["L_gp"] = k.L_gp;
  j["L"] = k.L;
  j["Lip"] = k.Lip;
  j["X_sup"] = k.X_sup;
  j["C_eps"] = k.C_eps;
  j["rate"] = json::array();
  for (double t : {0.0, 0.1, 1.0}) j["rate"].push_back({{"t", t}, {"r", stability_rate(k, t)}});
  out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_w1(const std::string& path_a, const std::string& path_b, std::ostream& out,
           std::ostream& err) {
  ParticleState a;
  ParticleState b;
  try {
    a = read_state_csv(path_a);
    b = read_state_csv(path_b);
  } catch (const CsvError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitConfig;
  }
  double w = 0.0;
  try {
    w = w1_distance(empirical_of(a), empirical_of(b));
  } catch (const std::exception& e) {
    err << "transport failed: " << e.what() << '\n';
    return kExitPostprocess;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", w);
  out << buf << '\n';
  return kExitOk;
}

}  // namespace so3agg
