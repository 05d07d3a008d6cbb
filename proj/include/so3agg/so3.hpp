#pragma once

// Exact-formula Riemannian geometry of the rotation group SO(3).
//
// The metric is half the Frobenius inner product, so a tangent vector R*A
// (A skew-symmetric) has length |A|_F / sqrt(2) and the geodesic distance
// between R and Q is the rotation angle of R^T Q.

#include <Eigen/Core>
#include <cstdint>
#include <random>

#include "so3agg/errors.hpp"

namespace so3agg {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;

/// Below this angle the logarithm switches to first-order axis extraction.
inline constexpr double kSmallAngle = 1e-7;
/// Below this angle f(theta) = theta / sin(theta) uses its Taylor series.
inline constexpr double kTaylorAngle = 1e-4;
/// Distances at or beyond this value are treated as the cut locus.
inline constexpr double kCutLocus = kPi - 1e-4;

/// Tolerances of the Rotation invariants.
inline constexpr double kOrthogonalityTol = 1e-9;
inline constexpr double kDeterminantTol = 1e-9;

/// A point of SO(3). Construction through from_matrix() checks the invariants.
class Rotation {
 public:
  Rotation() : m_(Mat3::Identity()) {}

  static Rotation identity() { return Rotation(); }

  /// Validates orthogonality and det = +1; throws DomainError otherwise.
  static Rotation from_matrix(const Mat3& m);

  /// Wraps a matrix already known to be a rotation (results of exact formulas).
  static Rotation unchecked(const Mat3& m) { return Rotation(m); }

  /// Row-major 9-tuple, the serialized form.
  static Rotation from_row_major(const double (&values)[9]);

  const Mat3& matrix() const { return m_; }
  Rotation transpose() const { return Rotation(m_.transpose()); }
  Rotation operator*(const Rotation& other) const { return Rotation(m_ * other.m_); }

  double orthogonality_error() const;

 private:
  explicit Rotation(const Mat3& m) : m_(m) {}

  Mat3 m_;
};

/// Chart coordinates (theta, axis) with theta in [0, pi] and a unit axis.
struct AxisAngle {
  double theta = 0.0;
  Vec3 axis = Vec3::UnitX();

  /// Normalizes the axis; theta == 0 gets the canonical axis (1, 0, 0).
  static AxisAngle make(double theta, const Vec3& axis);
};

/// Tangent vector base * gen at `base`, stored through the body generator.
struct TangentVector {
  Rotation base;
  Mat3 gen = Mat3::Zero();

  static TangentVector zero(const Rotation& base) { return {base, Mat3::Zero()}; }

  /// The tangent vector as a matrix of the ambient space R^{3x3}.
  Mat3 ambient() const { return base.matrix() * gen; }
  /// Length in the Riemannian metric.
  double norm() const;
};

/// Open geodesic disk D_r(center) with r below the convexity radius pi/2.
class DiskDomain {
 public:
  DiskDomain(const Rotation& center, double radius);

  const Rotation& center() const { return center_; }
  double radius() const { return radius_; }
  bool contains(const Rotation& r) const;

 private:
  Rotation center_;
  double radius_;
};

/// Axis sampling used when drawing random rotations in a disk.
enum class AxisSampling {
  /// Polar angle uniform in (0, pi), azimuth uniform in (0, 2 pi).
  /// This is not uniform on the sphere: it concentrates at the poles.
  kPolarAzimuth,
  /// Uniform on the unit sphere.
  kUniformSphere,
};

Mat3 hat(const Vec3& v);
Vec3 vee(const Mat3& a);

/// f(theta) = theta / sin(theta), with f(0) = 1.
double theta_over_sin(double theta);
/// Derivative of theta / sin(theta).
double theta_over_sin_derivative(double theta);

/// Rodrigues formula.
Rotation exp_axis_angle(const AxisAngle& aa);
/// Matrix exponential of a skew-symmetric matrix.
Rotation exp_skew(const Mat3& a);

/// Inverse of exp_axis_angle. Throws DomainError within 1e-4 of angle pi.
AxisAngle log_rotation(const Rotation& r);
/// Angle-axis coordinates for serialization. Unlike log_rotation it is total; at angle pi
/// the axis sign is arbitrary.
AxisAngle to_axis_angle(const Rotation& r);

/// Angle of R^T Q in [0, pi]. Total: defined for every pair.
double geodesic_distance(const Rotation& r, const Rotation& q);

/// Riemannian logarithm log_R(Q) = 1/2 f(theta) (Q - R Q^T R).
TangentVector log_map(const Rotation& r, const Rotation& q);

/// Riemannian exponential exp_R(R A) = R exp(A).
Rotation exp_map(const TangentVector& v);

/// Point at parameter t of the minimizing geodesic from R (t = 0) to Q (t = 1).
Rotation geodesic_point(const Rotation& r, const Rotation& q, double t);

/// Nearest rotation in the Frobenius norm (orthogonal polar factor).
/// Throws DegenerateInput when det(M) <= 0 or the smallest singular value is below 1e-6.
Rotation project_to_so3(const Mat3& m);

/// Random rotation strictly inside the disk: angle uniform in [0, radius),
/// axis drawn according to `sampling`, then translated to the disk centre.
Rotation random_rotation_in_disk(const DiskDomain& domain, std::mt19937_64& rng,
                                 AxisSampling sampling = AxisSampling::kPolarAzimuth);
Rotation random_rotation_in_disk(const DiskDomain& domain, std::uint64_t seed,
                                 AxisSampling sampling = AxisSampling::kPolarAzimuth);

}  // namespace so3agg
