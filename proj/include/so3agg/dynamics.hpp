#pragma once

// N-particle gradient flow dR_i/dt = -sum_j m_j grad K_{R_j}(R_i) on SO(3),
// its time integrators and the diagnostics used to watch consensus form.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "so3agg/potentials.hpp"
#include "so3agg/so3.hpp"

namespace so3agg {

/// Particle positions with masses summing to one; the empirical measure sum m_i delta_{R_i}.
struct ParticleState {
  std::vector<Rotation> rotations;
  std::vector<double> masses;
  double time = 0.0;

  /// Masses 1/N.
  static ParticleState equal_mass(std::vector<Rotation> rotations, double time = 0.0);

  std::size_t size() const { return rotations.size(); }
  /// Throws DomainError on size mismatch, nonpositive masses or total mass off by more than 1e-12.
  void validate() const;
};

enum class Integrator {
  /// Classical RK4 on the angle-axis coordinates (theta, axis) of every particle.
  kRk4AxisAngle,
  /// Classical RK4 in the ambient 3x3 matrix space, stages and result projected back onto SO(3).
  kLieRk4Projected,
};

std::string to_string(Integrator integrator);
/// Accepts "rk4_axis_angle" and "lie_rk4_projected".
std::optional<Integrator> parse_integrator(const std::string& name);

struct SimConfig {
  Potential potential = Potential::attractive_power(2.0);
  double dt = 0.01;
  std::size_t steps = 100000;
  Integrator integrator = Integrator::kLieRk4Projected;
  std::uint64_t seed = 0;
  DiskDomain init_disk{Rotation::identity(), kPi / 4};
  AxisSampling axis_sampling = AxisSampling::kPolarAzimuth;
  std::size_t particles = 20;
  std::size_t record_every = 10;
  /// Trajectory snapshots are kept every this many steps; 0 keeps only the first and last.
  std::size_t trajectory_every = 10;
  /// The run stops with status Consensus once the diameter drops below this.
  double consensus_tol = 1e-8;
  /// The run stops with status Equilibrium once the dissipation drops below this (0 disables).
  double equilibrium_tol = 1e-14;

  /// Throws DomainError when dt <= 0, consensus_tol <= 0, record_every == 0 or particles == 0.
  void validate() const;
};

struct DiagnosticsRecord {
  double time = 0.0;
  double energy = 0.0;
  double dissipation = 0.0;
  double diameter = 0.0;
  /// min_{i != j} tr(R_i^T R_j); 3 for a single particle.
  double min_trace = 3.0;
  double max_dist_to_center = 0.0;
};

enum class RunStatus { kCompleted, kConsensus, kEquilibrium };

std::string to_string(RunStatus status);

struct RunResult {
  std::vector<ParticleState> trajectory;
  std::vector<DiagnosticsRecord> diagnostics;
  RunStatus status = RunStatus::kCompleted;
  std::size_t steps_taken = 0;
};

/// Velocity of particle i. Throws CutLocusError when any pair is within 1e-4 of antipodal.
TangentVector velocity(const ParticleState& state, const Potential& pot, std::size_t i);

/// Body-frame angular velocities omega_i, with dR_i/dt = R_i hat(omega_i), for all particles.
/// Bitwise identical to calling velocity() per particle.
std::vector<Vec3> body_velocities(const ParticleState& state, const Potential& pot);

/// One step of size dt. Masses are kept; time advances by dt.
ParticleState step(const ParticleState& state, const Potential& pot, double dt,
                   Integrator integrator);

/// Draws config.particles equal-mass rotations from config.init_disk with config.seed.
ParticleState initial_state(const SimConfig& config);

RunResult run(const SimConfig& config);
/// Same as run(config) but from a caller-supplied initial state.
RunResult run(const SimConfig& config, ParticleState initial);

/// E = 1/2 sum_i sum_j m_i m_j K(R_i, R_j), self-terms included.
double energy(const ParticleState& state, const Potential& pot);
/// sum_i m_i |v_i|^2, which equals -dE/dt along the flow.
double dissipation(const ParticleState& state, const Potential& pot);
/// max_{i,j} d(R_i, R_j); 0 for one particle.
double diameter(const ParticleState& state);
/// min_{i != j} tr(R_i^T R_j). Throws InvalidForSingleParticle when N < 2.
double min_trace(const ParticleState& state);
double max_distance_to(const ParticleState& state, const Rotation& center);

/// First time the diameter drops below threshold, interpolating log(diameter) linearly between
/// the bracketing records. Empty when no record is below threshold.
std::optional<double> time_to_diameter(const std::vector<DiagnosticsRecord>& records,
                                       double threshold);

DiagnosticsRecord diagnose(const ParticleState& state, const Potential& pot,
                           const Rotation& center);

struct KarcherResult {
  Rotation mean;
  double residual = 0.0;
  std::size_t iterations = 0;
};

/// Riemannian centre of mass by the fixed-point iteration P <- exp_P(sum_i m_i log_P R_i)
/// started at points[0]. Throws NoConvergence after max_iter iterations.
KarcherResult karcher_mean(const std::vector<Rotation>& points, const std::vector<double>& masses,
                           double tol = 1e-12, std::size_t max_iter = 1000);

/// Lower bound on min_{i,j} tr(R_i^T R_j) at time t for a quadratic-type potential with
/// g' >= c: 3 + (T0 - 3) e / ((T0 - 2) - (T0 - 3) e), e = exp(-4 c t / N).
/// Requires T0 in (2, 3]; throws DomainError otherwise.
double theoretical_trace_bound(double t0, double c, std::size_t n, double t);

}  // namespace so3agg
