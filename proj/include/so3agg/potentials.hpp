#pragma once

// Intrinsic interaction potentials K(R, Q) = g(d(R, Q)^2).

#include <string>
#include <variant>

#include "so3agg/so3.hpp"

namespace so3agg {

/// K = d^q / q, i.e. g(s) = s^(q/2) / q. Requires q >= 2.
struct AttractivePower {
  double q = 2.0;
};

/// K = -d^p / p + d^q / q. Requires 0 < p < q.
struct RepulsiveAttractivePower {
  double p = 2.0;
  double q = 10.0;
};

/// K = V(d) - C V(d / l) with V(r) = -exp(-r^a / a), a = s_exp.
struct Morse {
  double C = 0.5;
  double l = 0.25;
  double s_exp = 2.0;
};

/// K = 2 sin^2(d / 2), the Lohe sphere-model potential; h is identically 1/2.
struct LoheSphere {};

class Potential {
 public:
  using Kind = std::variant<AttractivePower, RepulsiveAttractivePower, Morse, LoheSphere>;

  /// Throws DomainError when the parameters violate the kind's invariants.
  explicit Potential(Kind kind);

  static Potential attractive_power(double q) { return Potential(AttractivePower{q}); }
  static Potential repulsive_attractive_power(double p, double q) {
    return Potential(RepulsiveAttractivePower{p, q});
  }
  static Potential morse(double c, double l, double s_exp) { return Potential(Morse{c, l, s_exp}); }
  static Potential lohe() { return Potential(LoheSphere{}); }

  const Kind& kind() const { return kind_; }
  /// Tag used by the config format: attractive_power, repulsive_attractive_power, morse, lohe.
  std::string tag() const;

  /// g(s), s the squared distance.
  double g(double s) const;
  /// g'(s).
  double g_prime(double s) const;
  /// g''(s); may be infinite at s = 0 for small exponents.
  double g_second(double s) const;
  /// True when g'' is bounded on every [0, S], i.e. g' is Lipschitz up to zero.
  bool has_bounded_second_derivative() const;

  /// h(dist) = dist / sin(dist) * g'(dist^2), h(0) = g'(0). Throws DomainError for dist >= pi.
  double h(double dist) const;

  /// K(R, Q).
  double K(const Rotation& r, const Rotation& q) const;

 private:
  Kind kind_;
};

/// Intrinsic gradient of K(., Q) at R: -2 g'(d^2) log_R Q.
TangentVector grad_K(const Potential& pot, const Rotation& r, const Rotation& q);

/// Grid evaluation of the hypotheses used by the consensus results on [0, 4 r^2].
struct ConsensusReport {
  bool g_prime_nonneg = false;
  bool h_nondecreasing = false;
  bool h_positive_near_zero = false;
  /// Minimum of g' over the grid.
  double g_prime_lower_bound_c = 0.0;
};

/// Requires 0 < r < pi/2. Samples 10^4 equispaced squared distances.
ConsensusReport consensus_hypotheses(const Potential& pot, double r);

}  // namespace so3agg
