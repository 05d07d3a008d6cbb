#include "so3agg/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace so3agg {

namespace {

const std::vector<std::string> kKeys = {
    "preset",           "output.dir",         "potential.kind",   "potential.q",
    "potential.p",      "potential.C",        "potential.l",      "potential.s_exp",
    "sim.dt",           "sim.steps",          "sim.integrator",   "sim.seed",
    "sim.particles",    "sim.record_every",   "sim.trajectory_every", "sim.consensus_tol",
    "sim.equilibrium_tol", "init.radius",     "init.center",      "init.axis_sampling",
};

const std::vector<std::string> kPresets = {"fig1_consensus_q2", "fig1_sweep_q",
                                           "fig2a_powerlaw_p2_q10", "fig2b_morse_text",
                                           "fig2b_morse_caption"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  for (char c : key) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.')) return false;
  }
  return true;
}

[[noreturn]] void fail(const ConfigEntry& e, const std::string& what) {
  throw ConfigError(e.origin + ": " + e.key + " = '" + e.value + "': " + what);
}

double to_double(const ConfigEntry& e) {
  double x = 0.0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  const auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last || !std::isfinite(x)) fail(e, "expected a finite number");
  return x;
}

std::uint64_t to_uint(const ConfigEntry& e) {
  std::uint64_t x = 0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  const auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last) fail(e, "expected a nonnegative integer");
  return x;
}

std::array<double, 4> to_tuple4(const ConfigEntry& e) {
  std::string s = e.value;
  for (char& c : s) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(s);
  std::array<double, 4> out{};
  std::string token;
  std::size_t n = 0;
  while (in >> token) {
    if (n == 4) fail(e, "expected four numbers theta ax ay az");
    out[n++] = to_double(ConfigEntry{e.key, token, e.origin});
  }
  if (n != 4) fail(e, "expected four numbers theta ax ay az");
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ConfigEntries make_entries(const std::string& origin,
                           std::initializer_list<std::pair<const char*, const char*>> kv) {
  ConfigEntries out;
  for (const auto& [k, v] : kv) out.push_back({k, v, origin});
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

ConfigEntries parse_config_text(const std::string& text, const std::string& source) {
  ConfigEntries out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto where = [&](std::size_t col) {
      return source + ":" + std::to_string(lineno) + ":" + std::to_string(col + 1);
    };
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(where(line.find_first_not_of(" \t")) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (!valid_key(key)) {
      throw ConfigError(where(line.find_first_not_of(" \t")) + ": invalid key '" + key + "'");
    }
    const std::string value = trim(line.substr(eq + 1));
    const auto vcol = line.find_first_not_of(" \t", eq + 1);
    if (value.empty()) throw ConfigError(where(eq + 1) + ": missing value for '" + key + "'");
    out.push_back({key, value, where(vcol)});
  }
  return out;
}

ConfigEntries load_config_file(const std::string& path) {
  const std::string text = read_file(path);
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(path + ": " + e.what());
    }
    if (!j.contains("config") || !j["config"].is_object()) {
      throw ConfigError(path + ": no \"config\" object");
    }
    ConfigEntries out;
    for (const auto& [k, v] : j["config"].items()) {
      if (!v.is_string()) throw ConfigError(path + ": config." + k + " must be a string");
      out.push_back({k, v.get<std::string>(), path + ": config." + k});
    }
    return out;
  }
  return parse_config_text(text, path);
}

ConfigEntry parse_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("--set '" + assignment + "': expected key=value");
  }
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  if (!valid_key(key) || value.empty()) {
    throw ConfigError("--set '" + assignment + "': expected key=value");
  }
  return {canonical_key(key), value, "--set " + key};
}

std::vector<std::string> preset_names() { return kPresets; }

ConfigEntries preset_entries(const std::string& name) {
  const std::string origin = "preset " + name;
  if (name == "fig1_consensus_q2") {
    return make_entries(origin, {{"potential.kind", "attractive_power"},
                                 {"potential.q", "2"},
                                 {"sim.particles", "20"},
                                 {"sim.dt", "0.01"},
                                 {"sim.steps", "100000"},
                                 {"sim.record_every", "10"},
                                 {"sim.trajectory_every", "100"},
                                 {"sim.consensus_tol", "1e-7"},
                                 {"sim.equilibrium_tol", "0"}});
  }
  if (name == "fig1_sweep_q") {
    return make_entries(origin, {{"potential.kind", "attractive_power"},
                                 {"potential.q", "2"},
                                 {"sim.particles", "20"},
                                 {"sim.dt", "0.5"},
                                 {"sim.steps", "40000"},
                                 {"sim.record_every", "10"},
                                 {"sim.trajectory_every", "0"},
                                 {"sim.consensus_tol", "1e-7"},
                                 {"sim.equilibrium_tol", "0"}});
  }
  if (name == "fig2a_powerlaw_p2_q10") {
    return make_entries(origin, {{"potential.kind", "repulsive_attractive_power"},
                                 {"potential.p", "2"},
                                 {"potential.q", "10"},
                                 {"sim.particles", "40"},
                                 {"sim.dt", "0.01"},
                                 {"sim.steps", "100000"},
                                 {"sim.record_every", "10"},
                                 {"sim.trajectory_every", "1000"},
                                 {"sim.equilibrium_tol", "1e-14"}});
  }
  if (name == "fig2b_morse_text" || name == "fig2b_morse_caption") {
    const bool text = name == "fig2b_morse_text";
    return make_entries(origin, {{"potential.kind", "morse"},
                                 {"potential.C", text ? "0.5" : "0.1"},
                                 {"potential.l", text ? "0.25" : "0.2"},
                                 {"potential.s_exp", "2"},
                                 {"sim.particles", "40"},
                                 {"sim.dt", "1"},
                                 {"sim.steps", "300000"},
                                 {"sim.record_every", "100"},
                                 {"sim.trajectory_every", "0"},
                                 {"sim.equilibrium_tol", "1e-14"}});
  }
  std::string known;
  for (const auto& p : kPresets) known += (known.empty() ? "" : ", ") + p;
  throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
}

const std::vector<std::string>& config_keys() { return kKeys; }

std::string canonical_key(const std::string& key) {
  if (key.find('.') != std::string::npos) return key;
  for (const char* section : {"potential.", "sim.", "init."}) {
    const std::string full = section + key;
    for (const auto& k : kKeys) {
      if (k == full) return full;
    }
  }
  if (key == "output_dir") return "output.dir";
  return key;
}

ExperimentConfig build_config(const std::vector<ConfigEntries>& layers) {
  std::map<std::string, ConfigEntry> merged;
  std::optional<std::string> preset;
  for (const ConfigEntries& layer : layers) {
    for (const ConfigEntry& e : layer) {
      if (canonical_key(e.key) != "preset") continue;
      for (const ConfigEntry& p : preset_entries(e.value)) merged[p.key] = p;
      preset = e.value;
    }
    for (ConfigEntry e : layer) {
      e.key = canonical_key(e.key);
      if (e.key == "preset") continue;
      if (std::find(kKeys.begin(), kKeys.end(), e.key) == kKeys.end()) fail(e, "unknown key");
      merged[e.key] = e;
    }
  }

  ExperimentConfig cfg;
  cfg.preset = preset;
  const auto get = [&](const std::string& key) -> const ConfigEntry* {
    const auto it = merged.find(key);
    return it == merged.end() ? nullptr : &it->second;
  };
  const auto num = [&](const std::string& key, double fallback) {
    const ConfigEntry* e = get(key);
    return e ? to_double(*e) : fallback;
  };
  const auto count = [&](const std::string& key, std::uint64_t fallback) {
    const ConfigEntry* e = get(key);
    return e ? to_uint(*e) : fallback;
  };

  if (const ConfigEntry* e = get("output.dir")) cfg.output_dir = e->value;

  const ConfigEntry* kind = get("potential.kind");
  const std::string kind_name = kind ? kind->value : "attractive_power";
  const ConfigEntry kind_entry = kind ? *kind : ConfigEntry{"potential.kind", kind_name, "default"};
  try {
    if (kind_name == "attractive_power") {
      cfg.sim.potential = Potential::attractive_power(num("potential.q", AttractivePower{}.q));
    } else if (kind_name == "repulsive_attractive_power") {
      const RepulsiveAttractivePower d;
      cfg.sim.potential =
          Potential::repulsive_attractive_power(num("potential.p", d.p), num("potential.q", d.q));
    } else if (kind_name == "morse") {
      const Morse d;
      cfg.sim.potential = Potential::morse(num("potential.C", d.C), num("potential.l", d.l),
                                           num("potential.s_exp", d.s_exp));
    } else if (kind_name == "lohe") {
      cfg.sim.potential = Potential::lohe();
    } else {
      fail(kind_entry,
           "unknown potential kind (attractive_power, repulsive_attractive_power, morse, lohe)");
    }
  } catch (const DomainError& err) {
    std::vector<const ConfigEntry*> given;
    for (const char* k : {"potential.q", "potential.p", "potential.C", "potential.l", "potential.s_exp"}) {
      if (const ConfigEntry* e = get(k)) given.push_back(e);
    }
    if (given.size() == 1) fail(*given.front(), err.what());
    std::string where;
    for (const ConfigEntry* e : given) where += " " + e->origin + " " + e->key + " = " + e->value + ";";
    fail(kind_entry, err.what() + (where.empty() ? "" : " (given:" + where + ")"));
  }

  cfg.sim.dt = num("sim.dt", cfg.sim.dt);
  cfg.sim.steps = count("sim.steps", cfg.sim.steps);
  if (const ConfigEntry* e = get("sim.integrator")) {
    const auto integrator = parse_integrator(e->value);
    if (!integrator) fail(*e, "expected rk4_axis_angle or lie_rk4_projected");
    cfg.sim.integrator = *integrator;
  }
  cfg.sim.seed = count("sim.seed", cfg.sim.seed);
  cfg.sim.particles = count("sim.particles", cfg.sim.particles);
  cfg.sim.record_every = count("sim.record_every", cfg.sim.record_every);
  cfg.sim.trajectory_every = count("sim.trajectory_every", cfg.sim.trajectory_every);
  cfg.sim.consensus_tol = num("sim.consensus_tol", cfg.sim.consensus_tol);
  cfg.sim.equilibrium_tol = num("sim.equilibrium_tol", cfg.sim.equilibrium_tol);
  if (const ConfigEntry* e = get("init.axis_sampling")) {
    if (e->value == "polar_azimuth") {
      cfg.sim.axis_sampling = AxisSampling::kPolarAzimuth;
    } else if (e->value == "uniform_sphere") {
      cfg.sim.axis_sampling = AxisSampling::kUniformSphere;
    } else {
      fail(*e, "expected polar_azimuth or uniform_sphere");
    }
  }

  const double radius = num("init.radius", cfg.sim.init_disk.radius());
  Rotation center = Rotation::identity();
  if (const ConfigEntry* e = get("init.center")) {
    cfg.init_center = to_tuple4(*e);
    try {
      const auto& c = cfg.init_center;
      center = exp_axis_angle(AxisAngle::make(c[0], Vec3(c[1], c[2], c[3])));
    } catch (const DomainError& err) {
      fail(*e, err.what());
    }
  }
  try {
    cfg.sim.init_disk = DiskDomain(center, radius);
  } catch (const DomainError& err) {
    const ConfigEntry* e = get("init.radius");
    fail(e ? *e : ConfigEntry{"init.radius", format_double(radius), "default"}, err.what());
  }

  try {
    cfg.sim.validate();
  } catch (const DomainError& err) {
    throw ConfigError(std::string("invalid simulation settings: ") + err.what());
  }
  return cfg;
}

std::map<std::string, std::string> echo(const ExperimentConfig& config) {
  std::map<std::string, std::string> out;
  const SimConfig& s = config.sim;
  if (config.preset) out["preset"] = *config.preset;
  out["output.dir"] = config.output_dir;
  out["potential.kind"] = s.potential.tag();
  std::visit(
      [&out](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, AttractivePower>) {
          out["potential.q"] = format_double(k.q);
        } else if constexpr (std::is_same_v<T, RepulsiveAttractivePower>) {
          out["potential.p"] = format_double(k.p);
          out["potential.q"] = format_double(k.q);
        } else if constexpr (std::is_same_v<T, Morse>) {
          out["potential.C"] = format_double(k.C);
          out["potential.l"] = format_double(k.l);
          out["potential.s_exp"] = format_double(k.s_exp);
        }
      },
      s.potential.kind());
  out["sim.dt"] = format_double(s.dt);
  out["sim.steps"] = std::to_string(s.steps);
  out["sim.integrator"] = to_string(s.integrator);
  out["sim.seed"] = std::to_string(s.seed);
  out["sim.particles"] = std::to_string(s.particles);
  out["sim.record_every"] = std::to_string(s.record_every);
  out["sim.trajectory_every"] = std::to_string(s.trajectory_every);
  out["sim.consensus_tol"] = format_double(s.consensus_tol);
  out["sim.equilibrium_tol"] = format_double(s.equilibrium_tol);
  out["init.radius"] = format_double(s.init_disk.radius());
  const auto& c = config.init_center;
  out["init.center"] = format_double(c[0]) + "," + format_double(c[1]) + "," +
                       format_double(c[2]) + "," + format_double(c[3]);
  out["init.axis_sampling"] =
      s.axis_sampling == AxisSampling::kPolarAzimuth ? "polar_azimuth" : "uniform_sphere";
  return out;
}

}  // namespace so3agg
