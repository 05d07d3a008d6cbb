#include "so3agg/dynamics.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace so3agg {

namespace {

// Contribution of particle j to the body angular velocity of particle i (i < j),
// before weighting by m_j: 2 g'(theta^2) vee(log(R_i^T R_j)). Particle j receives
// the negated term, because log(R_j^T R_i) = -log(R_i^T R_j).
struct PairTerm {
  Vec3 u;
  double dist;
};

PairTerm pair_term(const Mat3& ri, const Mat3& rj, const Potential& pot, std::size_t i,
                   std::size_t j) {
  const Mat3 m = ri.transpose() * rj;
  const Vec3 w = 0.5 * Vec3(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
  const double c = std::clamp(0.5 * (m.trace() - 1.0), -1.0, 1.0);
  const double sin_theta = w.norm();
  const double theta = std::atan2(sin_theta, c);
  if (theta >= kCutLocus) throw CutLocusError(i, j, theta);
  if (sin_theta == 0.0) return {Vec3::Zero(), theta};
  const double f = theta < kTaylorAngle ? theta_over_sin(theta) : theta / sin_theta;
  return {(2.0 * pot.g_prime(theta * theta) * f) * w, theta};
}

struct Sweep {
  std::vector<Vec3> omega;
  double max_dist = 0.0;
};

// All body velocities. Accumulation runs over ascending j for every i.
Sweep sweep(const std::vector<Rotation>& rot, const std::vector<double>& mass,
            const Potential& pot) {
  const std::size_t n = rot.size();
  std::vector<Vec3> table(n * n, Vec3::Zero());
  Sweep out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const PairTerm t = pair_term(rot[i].matrix(), rot[j].matrix(), pot, i, j);
      table[i * n + j] = t.u;
      out.max_dist = std::max(out.max_dist, t.dist);
    }
  }
  out.omega.assign(n, Vec3::Zero());
  for (std::size_t i = 0; i < n; ++i) {
    Vec3 acc = Vec3::Zero();
    for (std::size_t j = 0; j < n; ++j) {
      if (j < i) {
        acc -= mass[j] * table[j * n + i];
      } else if (j > i) {
        acc += mass[j] * table[i * n + j];
      }
    }
    out.omega[i] = acc;
  }
  return out;
}

std::vector<Rotation> lie_rk4(const std::vector<Rotation>& rot, const std::vector<double>& mass,
                              const Potential& pot, double dt, const std::vector<Vec3>& omega1) {
  const std::size_t n = rot.size();
  const auto tangent = [&](const std::vector<Rotation>& at, const std::vector<Vec3>& omega) {
    std::vector<Mat3> k(n);
    for (std::size_t i = 0; i < n; ++i) k[i] = at[i].matrix() * hat(omega[i]);
    return k;
  };
  const auto stage = [&](const std::vector<Mat3>& k, double h) {
    std::vector<Rotation> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(project_to_so3(rot[i].matrix() + h * k[i]));
    return out;
  };

  const std::vector<Mat3> k1 = tangent(rot, omega1);
  const std::vector<Rotation> y2 = stage(k1, dt / 2);
  const std::vector<Mat3> k2 = tangent(y2, sweep(y2, mass, pot).omega);
  const std::vector<Rotation> y3 = stage(k2, dt / 2);
  const std::vector<Mat3> k3 = tangent(y3, sweep(y3, mass, pot).omega);
  const std::vector<Rotation> y4 = stage(k3, dt);
  const std::vector<Mat3> k4 = tangent(y4, sweep(y4, mass, pot).omega);

  std::vector<Rotation> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Mat3 y = rot[i].matrix() + (dt / 6) * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    out.push_back(project_to_so3(y));
  }
  return out;
}

// Angle-axis coordinates of one particle: theta and an unnormalized axis.
struct Chart {
  double theta;
  Vec3 axis;
};

constexpr double kChartMin = 1e-6;

void check_chart(std::size_t i, double theta) {
  if (!(theta > kChartMin && theta < kCutLocus)) throw ChartSingularity(i, theta);
}

std::vector<Rotation> chart_rk4(const std::vector<Rotation>& rot, const std::vector<double>& mass,
                                const Potential& pot, double dt) {
  const std::size_t n = rot.size();
  std::vector<Chart> x0(n);
  for (std::size_t i = 0; i < n; ++i) {
    check_chart(i, geodesic_distance(Rotation::identity(), rot[i]));
    const AxisAngle aa = log_rotation(rot[i]);
    x0[i] = {aa.theta, aa.axis};
  }

  // With R = exp(theta hat(v)) and dR/dt = R hat(omega):
  //   dtheta/dt = v . omega
  //   dv/dt     = 1/2 (cot(theta/2) (omega - (v . omega) v) + v x omega)
  const auto deriv = [&](const std::vector<Chart>& x) {
    std::vector<Rotation> at;
    at.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      check_chart(i, x[i].theta);
      at.push_back(exp_axis_angle(AxisAngle{x[i].theta, x[i].axis.normalized()}));
    }
    const std::vector<Vec3> omega = sweep(at, mass, pot).omega;
    std::vector<Chart> dx(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3 v = x[i].axis.normalized();
      const double along = v.dot(omega[i]);
      const double cot_half = 1.0 / std::tan(x[i].theta / 2);
      dx[i] = {along, 0.5 * (cot_half * (omega[i] - along * v) + v.cross(omega[i]))};
    }
    return dx;
  };
  const auto axpy = [&](const std::vector<Chart>& dx, double h) {
    std::vector<Chart> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = {x0[i].theta + h * dx[i].theta, x0[i].axis + h * dx[i].axis};
    }
    return out;
  };

  const std::vector<Chart> k1 = deriv(x0);
  const std::vector<Chart> k2 = deriv(axpy(k1, dt / 2));
  const std::vector<Chart> k3 = deriv(axpy(k2, dt / 2));
  const std::vector<Chart> k4 = deriv(axpy(k3, dt));

  std::vector<Rotation> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double theta =
        x0[i].theta + dt / 6 * (k1[i].theta + 2 * k2[i].theta + 2 * k3[i].theta + k4[i].theta);
    const Vec3 axis =
        x0[i].axis + dt / 6 * (k1[i].axis + 2 * k2[i].axis + 2 * k3[i].axis + k4[i].axis);
    check_chart(i, theta);
    out.push_back(exp_axis_angle(AxisAngle{theta, axis.normalized()}));
  }
  return out;
}

ParticleState advance(const ParticleState& state, const Potential& pot, double dt,
                      Integrator integrator, const std::vector<Vec3>& omega1) {
  ParticleState next;
  next.masses = state.masses;
  next.time = state.time + dt;
  if (integrator == Integrator::kLieRk4Projected) {
    next.rotations = lie_rk4(state.rotations, state.masses, pot, dt, omega1);
  } else {
    next.rotations = chart_rk4(state.rotations, state.masses, pot, dt);
  }
  return next;
}

}  // namespace

ParticleState ParticleState::equal_mass(std::vector<Rotation> rotations, double time) {
  ParticleState s;
  const std::size_t n = rotations.size();
  s.rotations = std::move(rotations);
  s.masses.assign(n, n == 0 ? 0.0 : 1.0 / static_cast<double>(n));
  s.time = time;
  return s;
}

void ParticleState::validate() const {
  if (rotations.empty()) throw DomainError("particle state is empty");
  if (rotations.size() != masses.size()) throw DomainError("rotations and masses differ in size");
  if (!std::all_of(masses.begin(), masses.end(), [](double m) { return m > 0.0; })) {
    throw DomainError("masses must be positive");
  }
  const double total = std::accumulate(masses.begin(), masses.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) {
    throw DomainError("masses must sum to 1, got " + std::to_string(total));
  }
}

std::string to_string(Integrator integrator) {
  return integrator == Integrator::kRk4AxisAngle ? "rk4_axis_angle" : "lie_rk4_projected";
}

std::optional<Integrator> parse_integrator(const std::string& name) {
  if (name == "rk4_axis_angle") return Integrator::kRk4AxisAngle;
  if (name == "lie_rk4_projected") return Integrator::kLieRk4Projected;
  return std::nullopt;
}

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::kConsensus:
      return "consensus";
    case RunStatus::kEquilibrium:
      return "equilibrium";
    case RunStatus::kCompleted:
      break;
  }
  return "completed";
}

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  if (!(consensus_tol > 0.0)) throw DomainError("consensus_tol must be positive");
  if (!(equilibrium_tol >= 0.0)) throw DomainError("equilibrium_tol must be nonnegative");
  if (record_every == 0) throw DomainError("record_every must be at least 1");
  if (particles == 0) throw DomainError("particles must be at least 1");
}

TangentVector velocity(const ParticleState& state, const Potential& pot, std::size_t i) {
  const std::size_t n = state.size();
  if (i >= n) throw DomainError("particle index out of range");
  Vec3 acc = Vec3::Zero();
  const Mat3& ri = state.rotations[i].matrix();
  for (std::size_t j = 0; j < n; ++j) {
    if (j < i) {
      acc -= state.masses[j] * pair_term(state.rotations[j].matrix(), ri, pot, j, i).u;
    } else if (j > i) {
      acc += state.masses[j] * pair_term(ri, state.rotations[j].matrix(), pot, i, j).u;
    }
  }
  return {state.rotations[i], hat(acc)};
}

std::vector<Vec3> body_velocities(const ParticleState& state, const Potential& pot) {
  return sweep(state.rotations, state.masses, pot).omega;
}

ParticleState step(const ParticleState& state, const Potential& pot, double dt,
                   Integrator integrator) {
  return advance(state, pot, dt, integrator, body_velocities(state, pot));
}

ParticleState initial_state(const SimConfig& config) {
  std::mt19937_64 rng(config.seed);
  std::vector<Rotation> rotations;
  rotations.reserve(config.particles);
  for (std::size_t i = 0; i < config.particles; ++i) {
    rotations.push_back(random_rotation_in_disk(config.init_disk, rng, config.axis_sampling));
  }
  return ParticleState::equal_mass(std::move(rotations));
}

RunResult run(const SimConfig& config) { return run(config, initial_state(config)); }

RunResult run(const SimConfig& config, ParticleState state) {
  config.validate();
  state.validate();
  const Potential& pot = config.potential;
  const Rotation& center = config.init_disk.center();

  RunResult result;
  const double t0 = state.time;
  for (std::size_t k = 0;; ++k) {
    Sweep eval;
    try {
      eval = sweep(state.rotations, state.masses, pot);
    } catch (const Error& e) {
      throw StepError(k, e.what());
    }
    double dissipation_now = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) {
      dissipation_now += state.masses[i] * eval.omega[i].squaredNorm();
    }

    bool stop = true;
    if (eval.max_dist < config.consensus_tol) {
      result.status = RunStatus::kConsensus;
    } else if (dissipation_now < config.equilibrium_tol) {
      result.status = RunStatus::kEquilibrium;
    } else if (k == config.steps) {
      result.status = RunStatus::kCompleted;
    } else {
      stop = false;
    }

    if (k % config.record_every == 0 || stop) {
      DiagnosticsRecord rec = diagnose(state, pot, center);
      rec.dissipation = dissipation_now;
      result.diagnostics.push_back(rec);
    }
    if (k == 0 || stop || (config.trajectory_every > 0 && k % config.trajectory_every == 0)) {
      result.trajectory.push_back(state);
    }
    if (stop) {
      result.steps_taken = k;
      break;
    }

    try {
      state = advance(state, pot, config.dt, config.integrator, eval.omega);
      state.time = t0 + static_cast<double>(k + 1) * config.dt;
    } catch (const Error& e) {
      throw StepError(k + 1, e.what());
    }
  }
  return result;
}

double energy(const ParticleState& state, const Potential& pot) {
  const std::size_t n = state.size();
  const double self = pot.g(0.0);
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    e += 0.5 * state.masses[i] * state.masses[i] * self;
    for (std::size_t j = i + 1; j < n; ++j) {
      e += state.masses[i] * state.masses[j] * pot.K(state.rotations[i], state.rotations[j]);
    }
  }
  return e;
}

double dissipation(const ParticleState& state, const Potential& pot) {
  const std::vector<Vec3> omega = body_velocities(state, pot);
  double d = 0.0;
  // |R hat(omega)| = |hat(omega)|_F / sqrt(2) = |omega|.
  for (std::size_t i = 0; i < state.size(); ++i) d += state.masses[i] * omega[i].squaredNorm();
  return d;
}

double diameter(const ParticleState& state) {
  double best = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    for (std::size_t j = i + 1; j < state.size(); ++j) {
      best = std::max(best, geodesic_distance(state.rotations[i], state.rotations[j]));
    }
  }
  return best;
}

double min_trace(const ParticleState& state) {
  if (state.size() < 2) throw InvalidForSingleParticle("min_trace needs at least two particles");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < state.size(); ++i) {
    for (std::size_t j = i + 1; j < state.size(); ++j) {
      const double tr =
          (state.rotations[i].matrix().transpose() * state.rotations[j].matrix()).trace();
      best = std::min(best, tr);
    }
  }
  return best;
}

double max_distance_to(const ParticleState& state, const Rotation& center) {
  double best = 0.0;
  for (const Rotation& r : state.rotations) best = std::max(best, geodesic_distance(center, r));
  return best;
}

std::optional<double> time_to_diameter(const std::vector<DiagnosticsRecord>& records,
                                       double threshold) {
  for (std::size_t k = 0; k < records.size(); ++k) {
    if (!(records[k].diameter < threshold)) continue;
    if (k == 0) return records[0].time;
    const DiagnosticsRecord& a = records[k - 1];
    const DiagnosticsRecord& b = records[k];
    if (!(b.diameter > 0.0)) return b.time;
    const double frac =
        std::log(a.diameter / threshold) / std::log(a.diameter / b.diameter);
    return a.time + frac * (b.time - a.time);
  }
  return std::nullopt;
}

DiagnosticsRecord diagnose(const ParticleState& state, const Potential& pot,
                           const Rotation& center) {
  DiagnosticsRecord rec;
  rec.time = state.time;
  rec.energy = energy(state, pot);
  rec.dissipation = dissipation(state, pot);
  rec.diameter = diameter(state);
  rec.min_trace = state.size() < 2 ? 3.0 : min_trace(state);
  rec.max_dist_to_center = max_distance_to(state, center);
  return rec;
}

double theoretical_trace_bound(double t0, double c, std::size_t n, double t) {
  if (!(t0 > 2.0 && t0 <= 3.0)) {
    throw DomainError("trace bound needs T0 in (2, 3], got " + std::to_string(t0));
  }
  if (t0 == 3.0) return 3.0;
  const double e = std::exp(-4.0 * c * t / static_cast<double>(n));
  return 3.0 + (t0 - 3.0) * e / ((t0 - 2.0) - (t0 - 3.0) * e);
}

}  // namespace so3agg
