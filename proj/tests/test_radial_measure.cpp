#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "cdim/philox.hpp"
#include "cdim/radial_measure.hpp"

namespace {

using namespace cdim;
namespace tf = cdim::test_functions;

constexpr double pi = std::numbers::pi;

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

std::vector<double> half_grid() {
  std::vector<double> xs;
  for (int k = 1; k <= 20; ++k) xs.push_back(0.5 * k);
  return xs;
}

TEST(Dimension, RejectsNonPositive) {
  EXPECT_THROW(Dimension(0.0), DomainError);
  EXPECT_THROW(Dimension(-1.0), DomainError);
  EXPECT_THROW((void)Dimension(INFINITY), DomainError);
}

TEST(Coefficient, Examples) {
  EXPECT_LT(rel_err(coefficient(2), pi), 4e-15);
  EXPECT_LT(rel_err(coefficient(1), 1.0), 4e-15);
  EXPECT_LT(rel_err(coefficient(4), pi * pi), 4e-15);
}

TEST(BallVolume, Examples) {
  EXPECT_LT(rel_err(ball_volume(1), 2.0), 4e-15);
  EXPECT_LT(rel_err(ball_volume(2), pi), 4e-15);
  EXPECT_LT(rel_err(ball_volume(3), 4.0 * pi / 3.0), 4e-15);
}

TEST(BallVolume, LargeDimensionDoesNotOverflow) {
  const double v = ball_volume(1000.0);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_GE(v, 0.0);
  EXPECT_TRUE(std::isfinite(ln_ball_volume(1000.0)));
  EXPECT_LT(ln_ball_volume(1000.0), -1000.0);
}

TEST(SphereArea, Examples) {
  EXPECT_LT(rel_err(sphere_area(2), 2 * pi), 4e-15);
  EXPECT_LT(rel_err(sphere_area(3), 4 * pi), 4e-15);
  EXPECT_LT(rel_err(sphere_area(1), 2.0), 4e-15);
}

TEST(Density, Examples) {
  EXPECT_LT(rel_err(density(2, 0.37), pi), 4e-15);
  EXPECT_LT(rel_err(density(4, 2.0), 2 * pi * pi), 4e-15);
  EXPECT_LT(rel_err(density(1, 0.25), 2.0), 4e-15);
  EXPECT_THROW(density(1, 0.0), DomainError);
  EXPECT_THROW(density(1, -1.0), DomainError);
}

TEST(SublevelMass, Examples) {
  EXPECT_LT(rel_err(sublevel_mass(1.0, 3.3), ball_volume(3.3)), 4e-15);
  EXPECT_LT(rel_err(sublevel_mass(4.0, 2), 4 * pi), 4e-15);
  EXPECT_LT(rel_err(sublevel_mass(0.25, 2), pi / 4), 4e-15);
}

TEST(GaussianMoment, Examples) {
  EXPECT_LT(rel_err(gaussian_moment(0.0, 3.0), std::pow(pi, 1.5)), 1e-14);
  EXPECT_LT(rel_err(gaussian_moment(1.0, 3.0), std::pow(pi, 1.5) * 1.5), 1e-14);
  EXPECT_LT(rel_err(gaussian_moment(2.0, 2.0), 2 * pi), 1e-14);
  EXPECT_THROW(gaussian_moment(-1.0, 2.0), DomainError);
}

TEST(IntegrateFunctional, Examples) {
  EXPECT_LT(rel_err(integrate_functional(3.7, tf::indicator(0, 1)).value, ball_volume(3.7)), 1e-10);
  EXPECT_LT(rel_err(integrate_functional(2, tf::exp_decay(40)).value, pi), 1e-10);
  // mpmath: C(3) * 2/5 = 2.5132741228718345908
  EXPECT_LT(rel_err(integrate_functional(3, tf::monomial(1, 0, 1)).value, 2.5132741228718345908), 1e-10);
}

TEST(IntegrateFunctional, LinearPathAgrees) {
  QuadratureConfig cfg;
  cfg.log_substitution = false;
  EXPECT_LT(rel_err(integrate_functional(3, tf::indicator(0, 1), cfg).value, ball_volume(3)), 1e-9);
  EXPECT_LT(rel_err(integrate_functional(1, tf::indicator(0, 1), cfg).value, 2.0), 1e-9);
}

TEST(IntegrateFunctional, NonDecayingInfiniteSupportIsDiagnosed) {
  TestFunction one;
  one.evaluator = [](double) { return 1.0; };
  EXPECT_THROW(integrate_functional(2, one), DivergenceError);
}

TEST(MellinTransform, Examples) {
  for (double s : {0.3, 1.0, 2.5}) EXPECT_LT(rel_err(mellin_transform(tf::indicator(0, 1), s).value, 1.0 / s), 1e-10);
  for (double x : {1.0, 3.0, 5.5}) EXPECT_LT(rel_err(mellin_transform(tf::exp_decay(), x / 2).value, cdim::gamma(x / 2)), 1e-10);
  EXPECT_LT(rel_err(mellin_transform(tf::monomial(1, 0, 2), 1.0).value, 2.0), 1e-10);
}

TEST(MellinTransform, DivergentAtZero) {
  EXPECT_THROW(mellin_transform(tf::indicator(0, 1), -0.5), DivergenceError);
}

TEST(ExpProbeTail, BoundsTheDroppedMass) {
  // int_40^inf e^{-u} u^{x/2-1} du for x = 20 against the bound.
  const double s = 10.0;
  const auto tail = integrate([s](double u) { return std::exp(-u + (s - 1) * std::log(u)); }, 40.0, INFINITY,
                              QuadratureConfig{});
  const double bound = exp_probe_tail_bound(s, 40.0);
  EXPECT_GE(bound, tail.value);
  EXPECT_LT(bound, 2 * tail.value);
}

TEST(VolumeTable, Examples) {
  const auto rows = volume_table(1, 3, 1);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_LT(rel_err(rows[0].V, 2.0), 4e-15);
  EXPECT_LT(rel_err(rows[1].V, pi), 4e-15);
  EXPECT_LT(rel_err(rows[2].V, 4 * pi / 3), 4e-15);
  EXPECT_EQ(volume_table(2, 2, 1).size(), 1u);
  // mpmath: V(0.5) = 1.4688125832636093762
  const auto half = volume_table(0.5, 0.5, 1);
  ASSERT_EQ(half.size(), 1u);
  EXPECT_LT(rel_err(half[0].V, 1.4688125832636093762), 1e-13);
  EXPECT_LT(rel_err(half[0].V, std::pow(pi, 0.25) / std::tgamma(1.25)), 1e-9);
}

TEST(VolumeTable, RejectsBadRange) {
  EXPECT_THROW(volume_table(0, 1, 1), DomainError);
  EXPECT_THROW(volume_table(2, 1, 1), DomainError);
  EXPECT_THROW(volume_table(1, 2, 0), DomainError);
}

TEST(VolumeTable, CsvFormat) {
  std::ostringstream os;
  write_volume_csv(os, volume_table(2, 2, 1));
  EXPECT_EQ(os.str(), "x,V,C,omega\n2,3.1415926535897931,3.1415926535897931,6.2831853071795862\n");
}

// Properties.

TEST(RadialProperties, QuadratureMatchesClosedFormOnGrid) {
  for (double x : half_grid()) {
    EXPECT_LT(rel_err(integrate_functional(x, tf::indicator(0, 1)).value, ball_volume(x)), 1e-9) << x;
  }
}

TEST(RadialProperties, GaussianAxiomOnGrid) {
  for (double x : half_grid()) {
    EXPECT_LT(rel_err(integrate_functional(x, tf::exp_decay(40)).value, std::pow(pi, x / 2)), 1e-8) << x;
  }
}

TEST(RadialProperties, MellinIdentityForRandomPiecewiseLinear) {
  PhiloxStream rng(7, 0);
  const auto xs = half_grid();
  for (int i = 0; i < 20; ++i) {
    const int knots = 3 + static_cast<int>(rng.uniform() * 6);
    std::vector<double> us, phis;
    double u = rng.uniform(0.0, 1.0);
    for (int k = 0; k < knots; ++k) {
      us.push_back(u);
      phis.push_back(k == 0 || k == knots - 1 ? 0.0 : rng.uniform(0.0, 2.0));
      u += rng.uniform(0.1, 2.0);
    }
    const auto phi = tf::piecewise_linear(us, phis);
    const double x = xs[static_cast<std::size_t>(rng.uniform() * xs.size())];
    const double lhs = integrate_functional(x, phi).value;
    const double rhs = coefficient(x) * mellin_transform(phi, x / 2).value;
    EXPECT_LT(rel_err(lhs, rhs), 1e-8) << "case " << i << " x = " << x;
  }
}

TEST(RadialProperties, VolumeIsTwoOverXTimesCoefficient) {
  for (double x = 0.1; x <= 1000.0; x *= 1.3) {
    EXPECT_LT(std::abs(ln_ball_volume(x) - (std::log(2.0 / x) + ln_coefficient(x))), 1e-14 * std::max(1.0, std::abs(ln_ball_volume(x))))
        << x;
  }
}

TEST(RadialProperties, SublevelMassMatchesQuadrature) {
  for (double x : {0.5, 2.0, 3.7, 9.0}) {
    for (double a : {0.2, 1.0, 3.5}) {
      const double closed = sublevel_mass(a, x);
      EXPECT_LT(rel_err(closed, std::pow(a, x / 2) * ball_volume(x)), 1e-13);
      EXPECT_LT(rel_err(integrate_functional(x, tf::indicator(0, a)).value, closed), 1e-9);
    }
  }
}

TEST(RadialProperties, GaussianMomentMatchesEuclideanSecondMoment) {
  // int_{R^n} |y|^2 e^{-|y|^2} dy = n/2 pi^{n/2}; the n = 1 case by quadrature.
  for (int n = 1; n <= 8; ++n)
    EXPECT_LT(rel_err(gaussian_moment(1.0, n), std::pow(pi, n / 2.0) * n / 2.0), 1e-14) << n;
  const auto one_d = integrate([](double y) { return y * y * std::exp(-y * y); }, -INFINITY, INFINITY, QuadratureConfig{});
  EXPECT_LT(rel_err(one_d.value, gaussian_moment(1.0, 1)), 1e-10);
}

}  // namespace
