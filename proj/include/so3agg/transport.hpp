#pragma once

// Empirical measures on SO(3), the exact 1-Wasserstein distance between them and the
// Lipschitz and stability constants of the interaction velocity field.

#include <Eigen/Core>
#include <vector>

#include "so3agg/dynamics.hpp"
#include "so3agg/potentials.hpp"
#include "so3agg/so3.hpp"

namespace so3agg {

struct EmpiricalMeasure {
  std::vector<Rotation> atoms;
  std::vector<double> masses;

  static EmpiricalMeasure uniform(std::vector<Rotation> atoms);
  std::size_t size() const { return atoms.size(); }
  /// Throws DomainError unless masses are positive and sum to 1 within 1e-12.
  void validate() const;
};

EmpiricalMeasure empirical_of(const ParticleState& state);

/// Minimum-cost perfect matching, cost(i, perm[i]) summed. Square cost matrix.
struct Assignment {
  std::vector<std::size_t> perm;
  double cost = 0.0;
};
Assignment solve_assignment(const Eigen::MatrixXd& cost);

/// Balanced transportation problem min sum c_ij x_ij with row sums a, column sums b.
/// Transportation simplex from a northwest-corner basis.
double solve_transport(const Eigen::MatrixXd& cost, const std::vector<double>& supply,
                       const std::vector<double>& demand);

/// W1 with geodesic ground cost. Uniform measures of equal size go through the assignment
/// solver, everything else through the transportation simplex.
double w1_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

struct StabilityConstants {
  double epsilon = 0.0;
  double C_f = 0.0;
  double L_f = 0.0;
  double C_gp = 0.0;
  double L_gp = 0.0;
  double L = 0.0;
  double Lip = 0.0;
  double X_sup = 0.0;
  double C_eps = 0.0;
};

/// Grid suprema (10^5 points) of f = theta / sin theta and |f'| on [0, pi - 2 eps], and of |g'|
/// and |g''| on [0, (pi - 2 eps)^2]; divided differences of g' stand in for g'' when g'' is
/// unbounded. Accepts eps in (0, pi/4]. Throws DomainError outside that range or when g' is
/// unbounded near zero.
StabilityConstants stability_constants(const Potential& pot, double epsilon);

/// r(eps, t) = exp((Lip + C_eps) t). Throws DomainError for t < 0.
double stability_rate(const StabilityConstants& consts, double t);

}  // namespace so3agg
