#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "cdim/homogeneous_polar.hpp"

namespace {

using namespace cdim;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double pi = std::numbers::pi;

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

std::vector<HomogeneousGauge> shipped_gauges() {
  return {gauge_euclidean(1),          gauge_euclidean(2),          gauge_euclidean(3),
          gauge_diagonal_power({2, 4}), gauge_diagonal_power({3, 3}), gauge_diagonal_power({1, 2, 4})};
}

// A non-normal generator with real spectrum {1, 2}.
DilationGenerator shear_generator() {
  MatrixXd e(2, 2);
  e << 1.0, 0.7, 0.3, 2.0;
  return DilationGenerator(e);
}

TEST(DilationGenerator, RejectsNonPositiveSpectrum) {
  MatrixXd e(2, 2);
  e << 1.0, 0.0, 0.0, -0.5;
  EXPECT_THROW(DilationGenerator{e}, DomainError);
  MatrixXd rot(2, 2);
  rot << 0.0, -1.0, 1.0, 0.0;  // eigenvalues +-i
  EXPECT_THROW(DilationGenerator{rot}, DomainError);
  MatrixXd spiral(2, 2);
  spiral << 0.5, -1.0, 1.0, 0.5;  // eigenvalues 0.5 +- i
  EXPECT_NO_THROW(DilationGenerator{spiral});
  EXPECT_THROW(DilationGenerator(MatrixXd::Identity(2, 3)), DomainError);
}

TEST(DilationGenerator, DimensionCap) {
  EXPECT_THROW(DilationGenerator::identity(11), DomainError);
  EXPECT_NO_THROW(DilationGenerator::identity(11, 12));
}

TEST(TraceOrder, Examples) {
  EXPECT_DOUBLE_EQ(trace_order(DilationGenerator::identity(3)), 3.0);
  EXPECT_DOUBLE_EQ(trace_order(DilationGenerator::diagonal({0.5, 0.25})), 0.75);
  MatrixXd s(2, 2);
  s << 2.0, 1.0, 1.0, 1.0;
  const MatrixXd similar = s * MatrixXd(DilationGenerator::diagonal({0.5, 0.25}).matrix()) * s.inverse();
  EXPECT_NEAR(trace_order(DilationGenerator(similar)), 0.75, 1e-14);
}

TEST(Dilate, Examples) {
  const VectorXd xi = (VectorXd(3) << 0.3, -1.2, 2.0).finished();
  EXPECT_TRUE(dilate(DilationGenerator::identity(3), 2.5, xi).isApprox(2.5 * xi, 1e-15));
  EXPECT_TRUE(dilate(shear_generator(), 1.0, xi.head(2)).isApprox(xi.head(2), 1e-15));
  const VectorXd out = dilate(DilationGenerator::diagonal({0.5, 0.25}), 16.0, VectorXd::Ones(2));
  EXPECT_DOUBLE_EQ(out(0), 4.0);
  EXPECT_DOUBLE_EQ(out(1), 2.0);
  EXPECT_THROW(dilate(DilationGenerator::identity(2), 0.0, VectorXd::Ones(2)), DomainError);
}

TEST(MatrixExponential, MatchesClosedForms) {
  MatrixXd rot(2, 2);
  rot << 0.0, -1.0, 1.0, 0.0;
  const double th = 2.3;
  MatrixXd want(2, 2);
  want << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  EXPECT_TRUE(matrix_exponential(th * rot).isApprox(want, 1e-13));
  MatrixXd jordan(2, 2);
  jordan << 1.5, 1.0, 0.0, 1.5;
  MatrixXd want_j(2, 2);
  want_j << std::exp(1.5), std::exp(1.5), 0.0, std::exp(1.5);
  EXPECT_TRUE(matrix_exponential(jordan).isApprox(want_j, 1e-13));
}

TEST(MatrixExponential, SymmetricPathAgreesWithPade) {
  MatrixXd e(3, 3);
  e << 1.0, 0.2, 0.1, 0.2, 0.8, 0.05, 0.1, 0.05, 1.4;
  const DilationGenerator g(e);
  ASSERT_TRUE(g.is_symmetric());
  for (double r : {0.01, 0.7, 30.0}) EXPECT_TRUE(dilation_matrix(g, r).isApprox(matrix_exponential(e * std::log(r)), 1e-12));
}

TEST(Gauges, EuclideanValues) {
  const double a[] = {-3.0};
  EXPECT_DOUBLE_EQ(gauge_euclidean(1)(a), 3.0);
  const double b[] = {3.0, 4.0};
  EXPECT_DOUBLE_EQ(gauge_euclidean(2)(b), 5.0);
  const double c[] = {1.0, 2.0, 2.0};
  EXPECT_DOUBLE_EQ(gauge_euclidean(3)(c), 3.0);
}

TEST(Gauges, DiagonalPowerOrders) {
  EXPECT_DOUBLE_EQ(gauge_diagonal_power({1}).mu(), 1.0);
  const auto sq = gauge_diagonal_power({2, 2});
  EXPECT_DOUBLE_EQ(sq.mu(), 1.0);
  const double v[] = {3.0, 4.0};
  EXPECT_DOUBLE_EQ(sq(v), 25.0);
  EXPECT_DOUBLE_EQ(gauge_diagonal_power({2, 4}).mu(), 0.75);
  EXPECT_THROW(gauge_diagonal_power({0.5}), DomainError);
}

TEST(Gauges, HomogeneityIsEnforced) {
  // |xi| is degree 1 for E = I, not for E = I/2.
  auto norm = [](std::span<const double> xi) { return std::hypot(xi[0], xi[1]); };
  EXPECT_THROW(make_gauge(norm, DilationGenerator::diagonal({0.5, 0.5}), "bad"), DomainError);
  EXPECT_NO_THROW(make_gauge(norm, DilationGenerator::identity(2), "ok"));
}

TEST(Gauges, NonDiagonalGeneratorGauge) {
  // P(xi) = |S^{-1} xi|^2 with E = S (I/2) S^{-1}.
  MatrixXd s(2, 2);
  s << 1.0, 0.5, 0.0, 1.0;
  const MatrixXd sinv = s.inverse();
  const DilationGenerator g(s * (0.5 * MatrixXd::Identity(2, 2)) * sinv);
  auto f = [sinv](std::span<const double> xi) {
    const VectorXd y = sinv * Eigen::Map<const VectorXd>(xi.data(), 2);
    return y.squaredNorm();
  };
  const auto p = make_gauge(f, g, "sheared");
  EXPECT_LT(homogeneity_defect(p, 1000, 3), 1e-9);
  EXPECT_DOUBLE_EQ(p.mu(), 1.0);
}

TEST(MonteCarlo, BallVolumeExamples) {
  const auto e1 = mc_ball_volume(gauge_euclidean(1), {1.1}, 1000000, 1);
  EXPECT_LT(std::abs(e1.mean - 2.0), 3 * e1.std_error);
  const auto e2 = mc_ball_volume(gauge_euclidean(2), {1.1, 1.1}, 1000000, 2);
  EXPECT_LT(std::abs(e2.mean - pi), 3 * e2.std_error);
  EXPECT_TRUE(e2.diagnostics.empty());
  // Product formula, checked against a 10^7-sample run: 3.4960767390561597473.
  const auto e3 = mc_ball_volume(gauge_diagonal_power({2, 4}), {1.1, 1.1}, 1000000, 3);
  EXPECT_LT(std::abs(e3.mean - 3.4960767390561597473), 3 * e3.std_error);
}

TEST(MonteCarlo, SmallBoxIsDiagnosed) {
  const auto e = mc_ball_volume(gauge_euclidean(2), {0.8, 0.8}, 10000, 1);
  EXPECT_FALSE(e.diagnostics.empty());
}

TEST(MonteCarlo, ExponentialExamples) {
  EXPECT_DOUBLE_EQ(mc_gauge_exponential(gauge_euclidean(1), 40, 1000, 1).mean, 2.0);
  const auto e2 = mc_gauge_exponential(gauge_euclidean(2), 40, 1000000, 5);
  EXPECT_LT(std::abs(e2.mean - 2 * pi), 3 * e2.std_error);
  EXPECT_LT(e2.tail_bound, 1e-12);
  const auto e3 = mc_gauge_exponential(gauge_diagonal_power({2, 4}), 0, 0, 0);
  EXPECT_EQ(e3.std_error, 0.0);
  EXPECT_LT(rel_err(e3.mean, 4 * std::tgamma(1.5) * std::tgamma(1.25)), 1e-14);
  EXPECT_LT(rel_err(e3.mean, 3.2131131218545579612), 1e-14);
}

TEST(MonteCarlo, ClosedFormMatchesSampling) {
  ExponentialOptions opts;
  opts.use_closed_form = false;
  const auto p = gauge_diagonal_power({2, 4});
  const auto mc = mc_gauge_exponential(p, suggest_truncation_radius(p, 1e-9), 1000000, 8, opts);
  EXPECT_LT(std::abs(mc.mean - 3.2131131218545579612), 3 * mc.std_error);
}

TEST(MonteCarlo, TruncationErrorSuggestsRadius) {
  ExponentialOptions opts;
  opts.tail_tolerance = 1e-6;
  try {
    mc_gauge_exponential(gauge_euclidean(2), 3.0, 1000, 1, opts);
    FAIL() << "expected TruncationError";
  } catch (const TruncationError& e) {
    EXPECT_GT(e.tail_bound(), 1e-6);
    EXPECT_GT(e.suggested_radius(), 3.0);
    EXPECT_LE(gauge_exponential_tail_bound(gauge_euclidean(2), e.suggested_radius()), 1e-6);
  }
}

TEST(MonteCarlo, TailBoundDominatesTrueTail) {
  // d = 2 euclidean: int_{max|xi|>R} e^{-|xi|} <= int_{|xi|>R} e^{-|xi|} = 2 pi (R + 1) e^{-R}.
  for (double r : {5.0, 10.0, 20.0}) {
    EXPECT_GE(gauge_exponential_tail_bound(gauge_euclidean(2), r), 2 * pi * (r + 1) * std::exp(-r) * 0.5);
  }
}

TEST(SurfaceMass, Examples) {
  const auto s1 = surface_mass(gauge_euclidean(1), 40, 1000, 1);
  EXPECT_DOUBLE_EQ(s1.mean, 2.0);
  const auto s2 = surface_mass(gauge_euclidean(2), 40, 1000000, 2);
  EXPECT_LT(std::abs(s2.mean - 2 * pi), 3 * s2.std_error);
  const auto p3 = gauge_euclidean(3);
  const auto s3 = surface_mass(p3, suggest_truncation_radius(p3, 1e-9), 1000000, 3);
  EXPECT_LT(std::abs(s3.mean - 4 * pi), 3 * s3.std_error);
}

TEST(GammaIdentity, Examples) {
  const auto c1 = gamma_identity_check(gauge_euclidean(1), 1000000, 11);
  EXPECT_LT(c1.z_score, 3.0);
  const auto c2 = gamma_identity_check(gauge_euclidean(2), {1.1, 1.1}, 40, 1000000, 12);
  EXPECT_LT(c2.z_score, 3.0);
  EXPECT_LT(c2.surface_z_score, 3.0);
  const auto c3 = gamma_identity_check(gauge_diagonal_power({2, 4}), 1000000, 13);
  EXPECT_LT(c3.z_score, 3.0);
}

TEST(RadialReduction, Examples) {
  const auto p = gauge_euclidean(2);
  const double radius = 40;
  // Phi = 1_(0,1): the gamma identity again.
  const auto ind = radial_reduction(p, test_functions::indicator(0, 1), {1.1, 1.1}, radius, {}, 1000000, 21);
  EXPECT_LT(ind.z_score, 3.0);
  EXPECT_NEAR(ind.rhs, pi, 5 * ind.rhs_std_error + 1e-12);
  // Phi = e^{-r} on a box large enough to hold its mass.
  const auto ex = radial_reduction(p, test_functions::exp_decay(), {radius, radius}, radius, {}, 1000000, 22);
  EXPECT_LT(ex.z_score, 3.0);
  // Phi = r 1_(0,1): rhs = 2 pi / 3.
  const auto lin = radial_reduction(p, test_functions::monomial(1, 0, 1), {1.1, 1.1}, radius, {}, 1000000, 23);
  EXPECT_LT(lin.z_score, 3.0);
  EXPECT_LT(std::abs(lin.rhs - 2 * pi / 3), 3 * lin.rhs_std_error);
}

TEST(References, ClosedForms) {
  EXPECT_LT(rel_err(*reference_volume(gauge_euclidean(2)), pi), 1e-15);
  EXPECT_LT(rel_err(*reference_exponential(gauge_euclidean(2)), 2 * pi), 1e-15);
  EXPECT_LT(rel_err(*reference_exponential(gauge_euclidean(3)), 8 * pi), 1e-14);
  // mpmath oracles.
  EXPECT_LT(rel_err(*reference_volume(gauge_diagonal_power({3, 3})), 3.5332775005708999146), 1e-13);
  EXPECT_LT(rel_err(*reference_volume(gauge_diagonal_power({1, 2, 4})), 3.9955162732070397112), 1e-13);
  EXPECT_LT(rel_err(*reference_exponential(gauge_diagonal_power({3, 3})), 3.1896496323298195435), 1e-13);
  EXPECT_LT(rel_err(*reference_exponential(gauge_diagonal_power({1, 2, 4})), 6.4262262437091159225), 1e-13);
}

// Properties.

TEST(PolarProperties, HomogeneityOfShippedGauges) {
  for (const auto& p : shipped_gauges()) EXPECT_LT(homogeneity_defect(p, 1000, 99), 1e-9) << p.label;
}

TEST(PolarProperties, DilationGroupLaw) {
  MatrixXd sym(2, 2);
  sym << 1.0, 0.3, 0.3, 0.6;
  const std::vector<DilationGenerator> gens = {DilationGenerator::diagonal({0.5, 0.25}), DilationGenerator(sym),
                                               shear_generator()};
  PhiloxStream rng(31, 0);
  for (const auto& g : gens) {
    for (int i = 0; i < 100; ++i) {
      const double r = std::exp(rng.uniform(-2, 2)), s = std::exp(rng.uniform(-2, 2));
      const VectorXd xi = (VectorXd(2) << rng.uniform(-1, 1), rng.uniform(-1, 1)).finished();
      const VectorXd lhs = dilate(g, r, dilate(g, s, xi));
      const VectorXd rhs = dilate(g, r * s, xi);
      for (Eigen::Index k = 0; k < 2; ++k)
        EXPECT_LE(std::abs(lhs(k) - rhs(k)), 1e-10 * std::max(std::abs(rhs(k)), rhs.norm() * 1e-3));
    }
  }
}

TEST(PolarProperties, ReproducibleAcrossThreadCounts) {
  const auto p = gauge_diagonal_power({2, 4});
  McOptions serial{64, 1}, parallel{64, 4};
  const auto a = mc_ball_volume(p, {1.1, 1.1}, 200000, 42, serial);
  const auto b = mc_ball_volume(p, {1.1, 1.1}, 200000, 42, parallel);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.std_error, b.std_error);
  ExponentialOptions es{serial, false, 0}, ep{parallel, false, 0};
  const auto c = mc_gauge_exponential(p, 10, 200000, 42, es);
  const auto d = mc_gauge_exponential(p, 10, 200000, 42, ep);
  EXPECT_EQ(c.mean, d.mean);
  EXPECT_EQ(c.std_error, d.std_error);
}

TEST(PolarProperties, GammaIdentitySuite) {
  std::uint64_t seed = 100;
  for (const auto& p : shipped_gauges()) {
    const auto c = gamma_identity_check(p, 1000000, seed++);
    EXPECT_LT(c.z_score, 3.0) << p.label;
    EXPECT_TRUE(c.volume.diagnostics.empty()) << p.label;
  }
}

TEST(PolarProperties, RotationalSpecialization) {
  for (std::size_t d = 1; d <= 3; ++d) {
    const auto p = gauge_euclidean(d);
    const auto s = surface_mass(p, suggest_truncation_radius(p, 1e-9), 1000000, 200 + d);
    const double want = sphere_area(static_cast<double>(d));
    if (s.std_error == 0.0) {
      EXPECT_LT(rel_err(s.mean, want), 1e-14) << d;
    } else {
      EXPECT_LT(std::abs(s.mean - want), 3 * s.std_error) << d;
    }
  }
}

}  // namespace
