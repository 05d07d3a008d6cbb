#include <cmath>

#include "so3agg/dynamics.hpp"

namespace so3agg {

KarcherResult karcher_mean(const std::vector<Rotation>& points, const std::vector<double>& masses,
                           double tol, std::size_t max_iter) {
  if (points.empty()) throw DomainError("karcher_mean needs at least one point");
  if (points.size() != masses.size()) throw DomainError("points and masses differ in size");

  KarcherResult out{points.front(), 0.0, 0};
  for (std::size_t iter = 0;; ++iter) {
    Mat3 step = Mat3::Zero();
    for (std::size_t i = 0; i < points.size(); ++i) {
      step += masses[i] * log_map(out.mean, points[i]).gen;
    }
    out.residual = vee(step).norm();
    out.iterations = iter;
    if (out.residual < tol) return out;
    if (iter == max_iter) break;
    out.mean = project_to_so3((out.mean * exp_skew(step)).matrix());
  }
  throw NoConvergence("karcher_mean did not converge in " + std::to_string(max_iter) +
                          " iterations",
                      out.residual);
}

}  // namespace so3agg
