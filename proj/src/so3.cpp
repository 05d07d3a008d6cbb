#include "so3agg/so3.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace so3agg {

CutLocusError::CutLocusError(std::size_t i, std::size_t j, double distance)
    : Error("particles " + std::to_string(i) + " and " + std::to_string(j) +
            " are at distance " + std::to_string(distance) + ", on or near the cut locus"),
      first_(i),
      second_(j),
      distance_(distance) {}

ChartSingularity::ChartSingularity(std::size_t particle, double theta)
    : Error("angle-axis chart singular for particle " + std::to_string(particle) +
            " (theta = " + std::to_string(theta) + ")"),
      particle_(particle),
      theta_(theta) {}

NoConvergence::NoConvergence(const std::string& what, double residual)
    : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}

StepError::StepError(std::size_t step, const std::string& cause)
    : Error("step " + std::to_string(step) + ": " + cause), step_(step) {}

namespace {

// sin(theta) * axis and cos(theta) of the rotation angle of m.
struct AngleParts {
  Vec3 sin_axis;
  double cos_angle;
};

AngleParts angle_parts(const Mat3& m) {
  return {0.5 * Vec3(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1)),
          0.5 * (m.trace() - 1.0)};
}

// atan2 form of acos((tr M - 1) / 2): same value, but accurate near 0 and pi
// and total for slightly non-orthogonal input.
double angle_of(const AngleParts& p) {
  return std::atan2(p.sin_axis.norm(), std::clamp(p.cos_angle, -1.0, 1.0));
}

}  // namespace

Rotation Rotation::from_matrix(const Mat3& m) {
  const double orth = (m.transpose() * m - Mat3::Identity()).norm();
  const double det = m.determinant();
  if (!(orth <= kOrthogonalityTol) || !(std::abs(det - 1.0) <= kDeterminantTol)) {
    std::ostringstream msg;
    msg << "matrix is not a rotation: |M^T M - I|_F = " << orth << ", det = " << det;
    throw DomainError(msg.str());
  }
  return Rotation(m);
}

Rotation Rotation::from_row_major(const double (&values)[9]) {
  Mat3 m;
  m << values[0], values[1], values[2], values[3], values[4], values[5], values[6], values[7],
      values[8];
  return from_matrix(m);
}

double Rotation::orthogonality_error() const {
  return (m_.transpose() * m_ - Mat3::Identity()).norm();
}

AxisAngle AxisAngle::make(double theta, const Vec3& axis) {
  if (!(theta >= 0.0 && theta <= kPi)) {
    throw DomainError("axis-angle theta must lie in [0, pi], got " + std::to_string(theta));
  }
  if (theta == 0.0) return AxisAngle{};
  const double n = axis.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("axis-angle axis must be nonzero");
  return AxisAngle{theta, axis / n};
}

double TangentVector::norm() const { return gen.norm() / std::sqrt(2.0); }

DiskDomain::DiskDomain(const Rotation& center, double radius) : center_(center), radius_(radius) {
  if (!(radius > 0.0 && radius < kPi / 2)) {
    throw DomainError("disk radius must lie in (0, pi/2), got " + std::to_string(radius));
  }
}

bool DiskDomain::contains(const Rotation& r) const {
  return geodesic_distance(center_, r) < radius_;
}

Mat3 hat(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

Vec3 vee(const Mat3& a) { return Vec3(a(2, 1), a(0, 2), a(1, 0)); }

double theta_over_sin(double theta) {
  if (std::abs(theta) < kTaylorAngle) {
    const double t2 = theta * theta;
    return 1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0;
  }
  return theta / std::sin(theta);
}

double theta_over_sin_derivative(double theta) {
  if (std::abs(theta) < kTaylorAngle) {
    return theta / 3.0 + 7.0 * theta * theta * theta / 90.0;
  }
  const double s = std::sin(theta);
  return (s - theta * std::cos(theta)) / (s * s);
}

Rotation exp_axis_angle(const AxisAngle& aa) {
  const Mat3 v = hat(aa.axis);
  return Rotation::unchecked(Mat3::Identity() + std::sin(aa.theta) * v +
                             (1.0 - std::cos(aa.theta)) * (v * v));
}

Rotation exp_skew(const Mat3& a) {
  const Vec3 w = vee(a);
  const double theta = w.norm();
  double sinc;
  double cosc;  // (1 - cos theta) / theta^2
  if (theta < kTaylorAngle) {
    const double t2 = theta * theta;
    sinc = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
    cosc = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
  } else {
    sinc = std::sin(theta) / theta;
    cosc = (1.0 - std::cos(theta)) / (theta * theta);
  }
  const Mat3 k = hat(w);
  return Rotation::unchecked(Mat3::Identity() + sinc * k + cosc * (k * k));
}

AxisAngle log_rotation(const Rotation& r) {
  const AngleParts p = angle_parts(r.matrix());
  const double theta = angle_of(p);
  if (theta >= kCutLocus) {
    throw DomainError("log_rotation: angle " + std::to_string(theta) +
                      " is within 1e-4 of pi (cut locus of the identity)");
  }
  const double s = p.sin_axis.norm();
  if (s == 0.0) return AxisAngle{};
  if (theta < kSmallAngle) {
    // First order: the skew part is theta * axis.
    return AxisAngle{theta, p.sin_axis / s};
  }
  const Vec3 axis = p.sin_axis / std::sin(theta);
  return AxisAngle{theta, axis.normalized()};
}

AxisAngle to_axis_angle(const Rotation& r) {
  const AngleParts p = angle_parts(r.matrix());
  const double theta = angle_of(p);
  if (theta < kCutLocus) return log_rotation(r);
  // (R + R^T) / 2 = cos(theta) I + (1 - cos(theta)) v v^T.
  const Mat3 b = (0.5 * (r.matrix() + r.matrix().transpose()) -
                  p.cos_angle * Mat3::Identity()) /
                 (1.0 - p.cos_angle);
  Eigen::Index k;
  b.diagonal().maxCoeff(&k);
  Vec3 axis = b.col(k).normalized();
  if (axis.dot(p.sin_axis) < 0.0) axis = -axis;
  return AxisAngle{theta, axis};
}

double geodesic_distance(const Rotation& r, const Rotation& q) {
  return angle_of(angle_parts(r.matrix().transpose() * q.matrix()));
}

TangentVector log_map(const Rotation& r, const Rotation& q) {
  const Mat3 m = r.matrix().transpose() * q.matrix();
  const double theta = angle_of(angle_parts(m));
  if (theta >= kCutLocus) {
    throw DomainError("log_map: points at distance " + std::to_string(theta) +
                      " are on or near the cut locus");
  }
  return {r, 0.5 * theta_over_sin(theta) * (m - m.transpose())};
}

Rotation exp_map(const TangentVector& v) { return v.base * exp_skew(v.gen); }

Rotation geodesic_point(const Rotation& r, const Rotation& q, double t) {
  const TangentVector v = log_map(r, q);
  return r * exp_skew(t * v.gen);
}

Rotation project_to_so3(const Mat3& m) {
  const double det = m.determinant();
  if (!(det > 0.0)) {
    throw DegenerateInput("project_to_so3: determinant must be positive, got " +
                          std::to_string(det));
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig;
  eig.computeDirect(m.transpose() * m, Eigen::EigenvaluesOnly);
  const double sigma_min = std::sqrt(std::max(0.0, eig.eigenvalues().minCoeff()));
  if (sigma_min < 1e-6) {
    throw DegenerateInput("project_to_so3: smallest singular value " + std::to_string(sigma_min) +
                          " is below 1e-6");
  }
  // Newton iteration for the orthogonal polar factor; quadratic convergence
  // and det > 0 keeps the iterate in SO(3).
  Mat3 x = m;
  for (int iter = 0; iter < 100; ++iter) {
    const Mat3 next = 0.5 * (x + x.inverse().transpose());
    const double change = (next - x).norm();
    x = next;
    if (change < 1e-15) break;
  }
  return Rotation::unchecked(x);
}

Rotation random_rotation_in_disk(const DiskDomain& domain, std::mt19937_64& rng,
                                 AxisSampling sampling) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double theta = domain.radius() * unit(rng);
  Vec3 axis;
  const double azimuth = 2.0 * kPi * unit(rng);
  if (sampling == AxisSampling::kPolarAzimuth) {
    const double polar = kPi * unit(rng);
    axis = Vec3(std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth),
                std::cos(polar));
  } else {
    const double z = 2.0 * unit(rng) - 1.0;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    axis = Vec3(rho * std::cos(azimuth), rho * std::sin(azimuth), z);
  }
  return domain.center() * exp_axis_angle(AxisAngle::make(theta, axis));
}

Rotation random_rotation_in_disk(const DiskDomain& domain, std::uint64_t seed,
                                 AxisSampling sampling) {
  std::mt19937_64 rng(seed);
  return random_rotation_in_disk(domain, rng, sampling);
}

}  // namespace so3agg
