#include <gtest/gtest.h>

#include "oracles.hpp"
#include "so3agg/potentials.hpp"

using namespace so3agg;

namespace {

std::vector<Potential> all_kinds() {
  return {Potential::attractive_power(2.0), Potential::attractive_power(4.0),
          Potential::repulsive_attractive_power(2.0, 10.0), Potential::morse(0.5, 0.25, 2.0),
          Potential::morse(0.1, 0.2, 2.0), Potential::lohe()};
}

}  // namespace

TEST(Potential, ValidatesParameters) {
  EXPECT_THROW(Potential::attractive_power(1.5), DomainError);
  EXPECT_THROW(Potential::repulsive_attractive_power(3.0, 2.0), DomainError);
  EXPECT_THROW(Potential::repulsive_attractive_power(0.0, 2.0), DomainError);
  EXPECT_THROW(Potential::morse(-1.0, 0.2, 2.0), DomainError);
  EXPECT_THROW(Potential::morse(0.5, 0.0, 2.0), DomainError);
  EXPECT_EQ(Potential::lohe().tag(), "lohe");
  EXPECT_EQ(Potential::morse(0.5, 0.25, 2).tag(), "morse");
}

TEST(Potential, ClosedForms) {
  const Potential q2 = Potential::attractive_power(2.0);
  EXPECT_DOUBLE_EQ(q2.g(0.49), 0.49 / 2);
  EXPECT_DOUBLE_EQ(q2.g_prime(0.49), 0.5);
  const Potential q4 = Potential::attractive_power(4.0);
  EXPECT_DOUBLE_EQ(q4.g(0.25), 0.0625 / 4);
  const Potential lohe = Potential::lohe();
  for (double d : {0.0, 0.3, 1.0, 2.5}) {
    EXPECT_NEAR(lohe.g(d * d), 1.0 - std::cos(d), 1e-15);
    // f(d) g'(d^2) = d / sin d * sin d / (2 d) = 1/2.
    EXPECT_NEAR(lohe.h(d), 0.5, 1e-14);
  }
  const Potential morse = Potential::morse(0.5, 0.25, 2.0);
  EXPECT_NEAR(morse.g(0.0), -1.0 + 0.5, 1e-15);
}

TEST(Potential, DerivativesMatchFiniteDifferences) {
  for (const Potential& pot : all_kinds()) {
    for (double s : {0.3, 0.05, 1.7}) {
      const double h = 1e-6;
      const double fd1 = (pot.g(s + h) - pot.g(s - h)) / (2 * h);
      EXPECT_NEAR(pot.g_prime(s), fd1, 1e-6 * std::max(1.0, std::abs(fd1))) << pot.tag() << s;
      const double fd2 = (pot.g_prime(s + h) - pot.g_prime(s - h)) / (2 * h);
      EXPECT_NEAR(pot.g_second(s), fd2, 1e-6 * std::max(1.0, std::abs(fd2))) << pot.tag() << s;
    }
  }
}

TEST(Potential, LoheSecondDerivativeSeriesIsContinuous) {
  const Potential lohe = Potential::lohe();
  const double below = lohe.g_second(1e-2 - 1e-12);
  const double above = lohe.g_second(1e-2 + 1e-12);
  EXPECT_NEAR(below, above, 1e-12);
  EXPECT_NEAR(lohe.g_second(0.0), -1.0 / 12, 1e-15);
}

TEST(Potential, HFunction) {
  for (const Potential& pot : all_kinds()) {
    EXPECT_DOUBLE_EQ(pot.h(0.0), pot.g_prime(0.0)) << pot.tag();
    EXPECT_THROW(pot.h(kPi), DomainError);
    EXPECT_THROW(pot.h(-0.1), DomainError);
  }
  EXPECT_NEAR(Potential::attractive_power(2.0).h(1.0), 0.5 / std::sin(1.0), 1e-15);
}

TEST(Potential, BoundedSecondDerivativeFlag) {
  EXPECT_TRUE(Potential::attractive_power(2.0).has_bounded_second_derivative());
  EXPECT_TRUE(Potential::attractive_power(4.0).has_bounded_second_derivative());
  EXPECT_FALSE(Potential::attractive_power(3.0).has_bounded_second_derivative());
  EXPECT_FALSE(std::isfinite(Potential::attractive_power(3.0).g_second(0.0)));
  EXPECT_TRUE(Potential::lohe().has_bounded_second_derivative());
}

TEST(GradK, MatchesGeodesicFiniteDifferences) {
  std::mt19937_64 rng(11);
  for (const Potential& pot : all_kinds()) {
    int checked = 0;
    while (checked < 20) {
      const Rotation r = Rotation::unchecked(oracle::haar_rotation(rng));
      const Rotation q = Rotation::unchecked(oracle::haar_rotation(rng));
      if (geodesic_distance(r, q) > kPi - 0.3) continue;
      const Mat3 a = oracle::skew(oracle::gaussian_vec(rng));
      const auto phi = [&](double e) {
        return pot.K(Rotation::unchecked(r.matrix() * oracle::series_exp(e * a)), q);
      };
      const double fd = oracle::central_difference(phi, 1e-5);
      const double exact = oracle::inner(grad_K(pot, r, q).gen, a);
      EXPECT_NEAR(exact, fd, 1e-5 * std::abs(fd) + 1e-10) << pot.tag();
      ++checked;
    }
  }
}

TEST(GradK, ZeroAtCoincidentPoints) {
  const Rotation r = exp_axis_angle(AxisAngle{0.4, Vec3::UnitY()});
  EXPECT_TRUE(grad_K(Potential::attractive_power(2.0), r, r).gen.isZero());
}

TEST(Consensus, QuadraticPotentialHypotheses) {
  const ConsensusReport rep = consensus_hypotheses(Potential::attractive_power(2.0), kPi / 8);
  EXPECT_TRUE(rep.g_prime_nonneg);
  EXPECT_TRUE(rep.h_nondecreasing);
  EXPECT_TRUE(rep.h_positive_near_zero);
  EXPECT_DOUBLE_EQ(rep.g_prime_lower_bound_c, 0.5);
}

TEST(Consensus, LoheLowerBoundIsMinimumOfGPrime) {
  const double r = kPi / 8;
  const ConsensusReport rep = consensus_hypotheses(Potential::lohe(), r);
  EXPECT_TRUE(rep.g_prime_nonneg);
  EXPECT_TRUE(rep.h_nondecreasing);
  // g'(s) = sin(sqrt s) / (2 sqrt s) decreases on [0, 4 r^2]; its minimum sits at the right end.
  EXPECT_NEAR(rep.g_prime_lower_bound_c, std::sin(2 * r) / (4 * r), 1e-12);
  EXPECT_LT(rep.g_prime_lower_bound_c, std::cos(r) / 2);
}

TEST(Consensus, RepulsionFailsNonnegativity) {
  const ConsensusReport rep =
      consensus_hypotheses(Potential::repulsive_attractive_power(2.0, 10.0), kPi / 8);
  EXPECT_FALSE(rep.g_prime_nonneg);
  EXPECT_LT(rep.g_prime_lower_bound_c, 0.0);
  EXPECT_THROW(consensus_hypotheses(Potential::lohe(), kPi / 2), DomainError);
}
