#pragma once

// Reference computations used by the tests. None of these call into the library's geometry, so
// they check it rather than restate it.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;

inline Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0, -v(2), v(1), v(2), 0, -v(0), -v(1), v(0), 0;
  return m;
}

// Matrix exponential by scaling and squaring around a 12-term Taylor series.
inline Mat3 series_exp(const Mat3& a) {
  int squarings = 0;
  Mat3 x = a;
  while (x.norm() > 0.05) {
    x /= 2.0;
    ++squarings;
  }
  Mat3 sum = Mat3::Identity();
  Mat3 term = Mat3::Identity();
  for (int k = 1; k <= 12; ++k) {
    term = term * x / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

// Haar-distributed rotation from a uniform unit quaternion.
inline Mat3 haar_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

inline Vec3 gaussian_vec(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return Vec3(n(rng), n(rng), n(rng));
}

// Rotation angle from the trace: acos((tr M - 1) / 2).
inline double trace_angle(const Mat3& m) {
  return std::acos(std::clamp((m.trace() - 1.0) / 2.0, -1.0, 1.0));
}

// Distance through the Frobenius identity |R - Q|_F^2 = 4 (1 - cos d).
inline double frobenius_distance(const Mat3& r, const Mat3& q) {
  const double f2 = (r - q).squaredNorm();
  return std::acos(std::clamp(1.0 - f2 / 4.0, -1.0, 1.0));
}

// Same identity in a form that stays accurate near 0 and pi: |R - Q|_F = 2 sqrt2 sin(d/2) and
// tr(R^T Q) + 1 = 4 cos^2(d/2).
inline double half_angle_distance(const Mat3& r, const Mat3& q) {
  const double s = (r - q).norm() / std::sqrt(8.0);
  const double c = std::sqrt(std::max(0.0, (r.transpose() * q).trace() + 1.0)) / 2.0;
  return 2.0 * std::atan2(s, c);
}

// Riemannian inner product <R X, R Y> = 1/2 tr(X^T Y) on body generators.
inline double inner(const Mat3& x, const Mat3& y) { return 0.5 * (x.transpose() * y).trace(); }

// Central difference of phi at 0.
inline double central_difference(const std::function<double(double)>& phi, double h) {
  return (phi(h) - phi(-h)) / (2.0 * h);
}

// Minimum over all permutations of sum_i cost(i, perm(i)).
inline double brute_force_assignment(const Eigen::MatrixXd& cost) {
  std::vector<int> perm(cost.rows());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (int i = 0; i < cost.rows(); ++i) s += cost(i, perm[i]);
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// RK4 for the scalar Riccati equation T' = (4c/N)(3 - T)(T - 2), the trace inequality taken as
// an equality.
inline double riccati_trace(double t0, double c, double n, double t, int steps = 20000) {
  const auto f = [&](double x) { return 4.0 * c / n * (3.0 - x) * (x - 2.0); };
  const double h = t / steps;
  double x = t0;
  for (int k = 0; k < steps; ++k) {
    const double k1 = f(x);
    const double k2 = f(x + h / 2 * k1);
    const double k3 = f(x + h / 2 * k2);
    const double k4 = f(x + h * k3);
    x += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return x;
}

// Least-squares line y = a + b x; returns {b, R^2}.
inline std::pair<double, double> linear_fit(const std::vector<double>& x,
                                            const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double b = sxy / sxx;
  return {b, (sxy * sxy) / (sxx * syy)};
}

// Number of groups under single linkage: points closer than threshold are joined.
inline int single_linkage_groups(const Eigen::MatrixXd& dist, double threshold) {
  const int n = static_cast<int>(dist.rows());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (dist(i, j) < threshold) parent[find(i)] = find(j);
    }
  }
  int groups = 0;
  for (int i = 0; i < n; ++i) groups += find(i) == i;
  return groups;
}

}  // namespace oracle
