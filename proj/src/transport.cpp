#include "so3agg/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace so3agg {

namespace {

constexpr int kGrid = 100000;

Eigen::MatrixXd cost_matrix(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  Eigen::MatrixXd c(mu.size(), nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t j = 0; j < nu.size(); ++j) c(i, j) = geodesic_distance(mu.atoms[i], nu.atoms[j]);
  }
  return c;
}

bool is_uniform(const EmpiricalMeasure& m) {
  const double w = 1.0 / static_cast<double>(m.size());
  return std::all_of(m.masses.begin(), m.masses.end(),
                     [w](double x) { return std::abs(x - w) <= 1e-15; });
}

struct Cell {
  std::size_t row;
  std::size_t col;
  double flow;
};

}  // namespace

EmpiricalMeasure EmpiricalMeasure::uniform(std::vector<Rotation> atoms) {
  EmpiricalMeasure m;
  const std::size_t n = atoms.size();
  m.atoms = std::move(atoms);
  m.masses.assign(n, n == 0 ? 0.0 : 1.0 / static_cast<double>(n));
  return m;
}

void EmpiricalMeasure::validate() const {
  if (atoms.empty()) throw DomainError("empirical measure has no atoms");
  if (atoms.size() != masses.size()) throw DomainError("atoms and masses differ in size");
  if (!std::all_of(masses.begin(), masses.end(), [](double m) { return m > 0.0; })) {
    throw DomainError("empirical measure masses must be positive");
  }
  const double total = std::accumulate(masses.begin(), masses.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) {
    throw DomainError("empirical measure masses sum to " + std::to_string(total));
  }
}

EmpiricalMeasure empirical_of(const ParticleState& state) {
  return EmpiricalMeasure{state.rotations, state.masses};
}

Assignment solve_assignment(const Eigen::MatrixXd& cost) {
  if (cost.rows() != cost.cols()) throw DomainError("assignment needs a square cost matrix");
  const std::size_t n = static_cast<std::size_t>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  // Shortest augmenting paths with row/column potentials; 1-based, column 0 is a sentinel.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  Assignment out;
  out.perm.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) out.perm[match[j] - 1] = j - 1;
  for (std::size_t i = 0; i < n; ++i) out.cost += cost(i, out.perm[i]);
  return out;
}

double solve_transport(const Eigen::MatrixXd& cost, const std::vector<double>& supply,
                       const std::vector<double>& demand) {
  const std::size_t m = supply.size();
  const std::size_t n = demand.size();
  if (m == 0 || n == 0 || cost.rows() != static_cast<Eigen::Index>(m) ||
      cost.cols() != static_cast<Eigen::Index>(n)) {
    throw DomainError("transport problem dimensions do not match");
  }

  // Northwest-corner basis: m + n - 1 cells, degenerate zeros kept so the basis is a tree.
  std::vector<Cell> basis;
  basis.reserve(m + n - 1);
  {
    std::vector<double> a = supply, b = demand;
    std::size_t i = 0, j = 0;
    while (true) {
      const double x = std::min(a[i], b[j]);
      basis.push_back({i, j, x});
      a[i] -= x;
      b[j] -= x;
      if (i == m - 1 && j == n - 1) break;
      if (j == n - 1 || (i < m - 1 && a[i] <= b[j])) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  // Tree nodes: rows 0..m-1, columns m..m+n-1.
  const std::size_t nodes = m + n;
  std::vector<std::vector<std::size_t>> adj(nodes);
  std::vector<double> pot(nodes);
  std::vector<std::size_t> parent_edge(nodes), parent(nodes), order;
  const std::size_t none = std::numeric_limits<std::size_t>::max();
  const double tol = 1e-12 * std::max(1.0, cost.cwiseAbs().maxCoeff());

  const std::size_t max_iter = 50 * (m + n) * (m + n) + 1000;
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    for (auto& a : adj) a.clear();
    for (std::size_t e = 0; e < basis.size(); ++e) {
      adj[basis[e].row].push_back(e);
      adj[m + basis[e].col].push_back(e);
    }
    // Duals u_i + v_j = c_ij on basic cells, rooted at row 0.
    std::fill(parent.begin(), parent.end(), none);
    order.assign(1, 0);
    parent[0] = 0;
    pot[0] = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
      const std::size_t node = order[k];
      for (std::size_t e : adj[node]) {
        const std::size_t other = node < m ? m + basis[e].col : basis[e].row;
        if (parent[other] != none) continue;
        parent[other] = node;
        parent_edge[other] = e;
        pot[other] = cost(basis[e].row, basis[e].col) - pot[node];
        order.push_back(other);
      }
    }

    double best = -tol;
    std::size_t in_row = none, in_col = none;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double r = cost(i, j) - pot[i] - pot[m + j];
        if (r < best) {
          best = r;
          in_row = i;
          in_col = j;
        }
      }
    }
    if (in_row == none) {
      double total = 0.0;
      for (const Cell& c : basis) total += cost(c.row, c.col) * c.flow;
      return total;
    }

    // Tree path from the entering column up to the root and from the entering row up to the
    // root; the cycle is their symmetric difference.
    const auto path_to_root = [&](std::size_t node) {
      std::vector<std::size_t> p{node};
      while (node != 0) {
        node = parent[node];
        p.push_back(node);
      }
      return p;
    };
    std::vector<std::size_t> from_col = path_to_root(m + in_col);
    std::vector<std::size_t> from_row = path_to_root(in_row);
    while (from_col.size() > 1 && from_row.size() > 1 &&
           from_col[from_col.size() - 2] == from_row[from_row.size() - 2]) {
      from_col.pop_back();
      from_row.pop_back();
    }
    // Edges along column -> ... -> meet <- ... <- row, in cycle order starting next to the column.
    std::vector<std::size_t> cycle;
    for (std::size_t k = 0; k + 1 < from_col.size(); ++k) cycle.push_back(parent_edge[from_col[k]]);
    for (std::size_t k = from_row.size() - 1; k-- > 0;) cycle.push_back(parent_edge[from_row[k]]);

    // Alternating signs, first edge after the entering cell gets minus.
    double theta = std::numeric_limits<double>::infinity();
    std::size_t leave = none;
    for (std::size_t k = 0; k < cycle.size(); k += 2) {
      if (basis[cycle[k]].flow < theta) {
        theta = basis[cycle[k]].flow;
        leave = cycle[k];
      }
    }
    for (std::size_t k = 0; k < cycle.size(); ++k) {
      basis[cycle[k]].flow += (k % 2 == 0 ? -theta : theta);
    }
    basis[leave] = {in_row, in_col, theta};
  }
  throw NoConvergence("transportation simplex exceeded its iteration limit", 0.0);
}

double w1_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  mu.validate();
  nu.validate();
  const Eigen::MatrixXd c = cost_matrix(mu, nu);
  if (mu.size() == nu.size() && is_uniform(mu) && is_uniform(nu)) {
    return solve_assignment(c).cost / static_cast<double>(mu.size());
  }
  return solve_transport(c, mu.masses, nu.masses);
}

StabilityConstants stability_constants(const Potential& pot, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= kPi / 4)) {
    throw DomainError("stability constants need epsilon in (0, pi/4], got " +
                      std::to_string(epsilon));
  }
  StabilityConstants k;
  k.epsilon = epsilon;

  const double theta_max = kPi - 2 * epsilon;
  const double s_max = theta_max * theta_max;
  const bool smooth = pot.has_bounded_second_derivative();
  double prev_gp = 0.0;
  for (int i = 0; i < kGrid; ++i) {
    const double theta = theta_max * i / (kGrid - 1);
    k.C_f = std::max(k.C_f, theta_over_sin(theta));
    k.L_f = std::max(k.L_f, std::abs(theta_over_sin_derivative(theta)));

    const double s = s_max * i / (kGrid - 1);
    const double gp = pot.g_prime(s);
    if (!std::isfinite(gp)) {
      throw DomainError("g' is unbounded near zero; the potential violates the growth hypothesis");
    }
    k.C_gp = std::max(k.C_gp, std::abs(gp));
    if (smooth) {
      k.L_gp = std::max(k.L_gp, std::abs(pot.g_second(s)));
    } else if (i > 0) {
      k.L_gp = std::max(k.L_gp, std::abs(gp - prev_gp) / (s_max / (kGrid - 1)));
    }
    prev_gp = gp;
  }

  const double pi2 = kPi * kPi;
  k.L = 4 * pi2 * k.L_gp + 2 * std::sqrt(3.0) * k.C_gp * (k.L_f + std::sqrt(2.0) * k.C_f);
  k.Lip = (4 * pi2 * k.L_gp + 2 * k.C_gp * (std::sqrt(3.0) * k.L_f + std::sqrt(2.0) * k.C_f)) /
          std::sqrt(2.0);
  k.X_sup = 2 * kPi * k.C_gp;
  const double half = kPi / 2 - epsilon;
  k.C_eps = std::sqrt(6.0) * std::tan(half) / half * k.X_sup + k.L / std::sqrt(2.0);
  return k;
}

double stability_rate(const StabilityConstants& consts, double t) {
  if (!(t >= 0.0)) throw DomainError("stability rate needs t >= 0");
  return std::exp((consts.Lip + consts.C_eps) * t);
}

}  // namespace so3agg
