#include "so3agg/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace so3agg {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double power(double s, double e) {
  if (e == 0.0) return 1.0;
  if (e == 1.0) return s;
  return std::pow(s, e);
}

// c * s^e, treating a zero coefficient as exactly zero even where s^e is infinite.
double scaled_pow(double c, double s, double e) { return c == 0.0 ? 0.0 : c * power(s, e); }

bool lipschitz_exponent(double e) { return e == 2.0 || e >= 4.0; }

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError("invalid potential: " + what);
}

}  // namespace

Potential::Potential(Kind kind) : kind_(kind) {
  std::visit(Overloaded{
                 [](const AttractivePower& k) { require(k.q >= 2.0, "attractive power needs q >= 2"); },
                 [](const RepulsiveAttractivePower& k) {
                   require(k.p > 0.0 && k.p < k.q, "repulsive-attractive power needs 0 < p < q");
                 },
                 [](const Morse& k) {
                   require(k.C > 0.0 && k.l > 0.0 && k.s_exp > 0.0, "Morse needs C, l, s > 0");
                 },
                 [](const LoheSphere&) {},
             },
             kind_);
}

std::string Potential::tag() const {
  return std::visit(Overloaded{
                        [](const AttractivePower&) { return std::string("attractive_power"); },
                        [](const RepulsiveAttractivePower&) {
                          return std::string("repulsive_attractive_power");
                        },
                        [](const Morse&) { return std::string("morse"); },
                        [](const LoheSphere&) { return std::string("lohe"); },
                    },
                    kind_);
}

double Potential::g(double s) const {
  return std::visit(
      Overloaded{
          [s](const AttractivePower& k) { return std::pow(s, k.q / 2) / k.q; },
          [s](const RepulsiveAttractivePower& k) {
            return -std::pow(s, k.p / 2) / k.p + std::pow(s, k.q / 2) / k.q;
          },
          [s](const Morse& k) {
            const double r = std::sqrt(s);
            const double a = k.s_exp;
            return -std::exp(-std::pow(r, a) / a) + k.C * std::exp(-std::pow(r / k.l, a) / a);
          },
          [s](const LoheSphere&) {
            const double half = std::sin(std::sqrt(s) / 2);
            return 2.0 * half * half;
          },
      },
      kind_);
}

double Potential::g_prime(double s) const {
  return std::visit(
      Overloaded{
          [s](const AttractivePower& k) { return 0.5 * power(s, k.q / 2 - 1); },
          [s](const RepulsiveAttractivePower& k) {
            return -0.5 * power(s, k.p / 2 - 1) + 0.5 * power(s, k.q / 2 - 1);
          },
          [s](const Morse& k) {
            const double a = k.s_exp;
            const double sl = s / (k.l * k.l);
            const double attract = 0.5 * power(s, (a - 2) / 2) * std::exp(-power(s, a / 2) / a);
            const double repel = k.C / (2 * k.l * k.l) * power(sl, (a - 2) / 2) *
                                 std::exp(-power(sl, a / 2) / a);
            return attract - repel;
          },
          [s](const LoheSphere&) {
            if (s < 1e-12) return 0.5 * (1.0 - s / 6.0);
            const double x = std::sqrt(s);
            return std::sin(x) / (2 * x);
          },
      },
      kind_);
}

double Potential::g_second(double s) const {
  return std::visit(
      Overloaded{
          [s](const AttractivePower& k) { return scaled_pow(0.5 * (k.q / 2 - 1), s, k.q / 2 - 2); },
          [s](const RepulsiveAttractivePower& k) {
            return scaled_pow(-0.5 * (k.p / 2 - 1), s, k.p / 2 - 2) +
                   scaled_pow(0.5 * (k.q / 2 - 1), s, k.q / 2 - 2);
          },
          [s](const Morse& k) {
            // d/ds of 1/2 u^(a-2) e^(-u^a/a) with u = sqrt(s) is
            // 1/4 e^(-u^a/a) ((a-2) u^(a-4) - u^(2a-4)).
            const double a = k.s_exp;
            const auto part = [a](double ss) {
              return 0.25 * std::exp(-std::pow(ss, a / 2) / a) *
                     (scaled_pow(a - 2, ss, (a - 4) / 2) - std::pow(ss, a - 2));
            };
            const double l2 = k.l * k.l;
            return part(s) - k.C / (l2 * l2) * part(s / l2);
          },
          [s](const LoheSphere&) {
            if (s < 1e-2) return -1.0 / 12 + s / 120 - s * s / 3360 + s * s * s / 181440;
            const double x = std::sqrt(s);
            return (x * std::cos(x) - std::sin(x)) / (4 * x * x * x);
          },
      },
      kind_);
}

bool Potential::has_bounded_second_derivative() const {
  return std::visit(Overloaded{
                        [](const AttractivePower& k) { return lipschitz_exponent(k.q); },
                        [](const RepulsiveAttractivePower& k) {
                          return lipschitz_exponent(k.p) && lipschitz_exponent(k.q);
                        },
                        [](const Morse& k) { return lipschitz_exponent(k.s_exp); },
                        [](const LoheSphere&) { return true; },
                    },
                    kind_);
}

double Potential::h(double dist) const {
  if (!(dist >= 0.0 && dist < kPi)) {
    throw DomainError("h is defined on [0, pi), got " + std::to_string(dist));
  }
  return theta_over_sin(dist) * g_prime(dist * dist);
}

double Potential::K(const Rotation& r, const Rotation& q) const {
  const double d = geodesic_distance(r, q);
  return g(d * d);
}

TangentVector grad_K(const Potential& pot, const Rotation& r, const Rotation& q) {
  TangentVector log = log_map(r, q);
  if (log.gen.isZero(0.0)) return log;
  const double d = log.norm();
  log.gen *= -2.0 * pot.g_prime(d * d);
  return log;
}

ConsensusReport consensus_hypotheses(const Potential& pot, double r) {
  if (!(r > 0.0 && r < kPi / 2)) {
    throw DomainError("consensus_hypotheses needs 0 < r < pi/2, got " + std::to_string(r));
  }
  constexpr int kGrid = 10000;
  const double s_max = 4 * r * r;
  std::vector<double> gp(kGrid);
  std::vector<double> h(kGrid);
  for (int k = 0; k < kGrid; ++k) {
    const double s = s_max * k / (kGrid - 1);
    gp[k] = pot.g_prime(s);
    h[k] = pot.h(std::sqrt(s));
  }

  ConsensusReport report;
  report.g_prime_nonneg = std::all_of(gp.begin(), gp.end(), [](double v) { return v >= 0.0; });
  report.h_nondecreasing = true;
  for (int k = 0; k + 1 < kGrid; ++k) {
    // Rounding slack for potentials whose h is constant.
    const double slack = 1e-12 * std::max(1.0, std::abs(h[k]));
    if (h[k + 1] < h[k] - slack) {
      report.h_nondecreasing = false;
      break;
    }
  }
  report.h_positive_near_zero = h[1] > 0.0;
  report.g_prime_lower_bound_c = *std::min_element(gp.begin(), gp.end());
  return report;
}

}  // namespace so3agg
