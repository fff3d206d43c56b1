#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "cdim/axiom_lab.hpp"

namespace {

using namespace cdim;
namespace tf = cdim::test_functions;

constexpr double pi = std::numbers::pi;

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

TEST(ScalingCovariance, ClassifiedDensityPasses) {
  const auto sc = check_scaling_covariance(candidates::classified(3), 3, {0.5, 2, 10}, tf::default_probes());
  EXPECT_LT(sc.residual, 1e-8);
  EXPECT_TRUE(sc.warnings.empty());
}

TEST(ScalingCovariance, ExponentialFailsWithDerivedResidual) {
  // Direct quadrature of both sides (scipy): 0.5335477962758021.
  const auto sc = check_scaling_covariance(candidates::exponential(), 2, {2.0}, {tf::tent(0.3, 1.5)});
  EXPECT_NEAR(sc.residual, 0.5335477962758021, 1e-9);
  const auto report = evaluate_axioms(candidates::exponential(), 2);
  EXPECT_TRUE(report.verdict == Verdict::fails_scaling || report.verdict == Verdict::fails_both);
}

TEST(ScalingCovariance, AnyConstantPowerLawPasses) {
  for (double c : {0.01, 1.0, 42.0}) {
    const auto sc = check_scaling_covariance(candidates::power_law(1.3, c), 2.6, {0.5, 2, 10, 123.4}, tf::default_probes());
    EXPECT_LT(sc.residual, 1e-8) << c;
  }
}

TEST(ScalingCovariance, ZeroIntegralProbeIsSkippedWithWarning) {
  TestFunction zero = tf::indicator(1, 2);
  zero.evaluator = [](double) { return 0.0; };
  const auto sc = check_scaling_covariance(candidates::classified(2), 2, {2.0}, {zero, tf::tent(1, 3)});
  EXPECT_EQ(sc.warnings.size(), 1u);
  EXPECT_LT(sc.residual, 1e-8);
}

TEST(GaussianNormalization, Examples) {
  for (double x : {0.7, 3.0, 8.0}) {
    EXPECT_LT(check_gaussian_normalization(candidates::classified(x), x), 1e-9) << x;
    EXPECT_NEAR(check_gaussian_normalization(candidates::classified(x, 2.0), x), 1.0, 1e-9) << x;
  }
  // mpmath: |Gamma(x/2) - pi^{x/2}| / pi^{x/2}.
  const std::pair<double, double> unnormalized[] = {
      {1, 0.0}, {2, 0.68169011381620932846}, {3, 0.84084505690810466423}, {5, 0.92400911226824667142}};
  for (auto [x, want] : unnormalized) {
    EXPECT_NEAR(check_gaussian_normalization(candidates::power_law(x / 2), x), want, 1e-9) << x;
  }
}

TEST(GaussianNormalization, DivergentCandidateIsDiagnosed) {
  CandidateDensity grows{[](double u) { return std::exp(2 * u); }, "exp(2u)"};
  EXPECT_THROW(check_gaussian_normalization(grows, 2), DivergenceError);
}

TEST(HaarProfile, ClassifiedIsFlat) {
  const auto h = haar_profile(candidates::classified(3.3), 3.3, default_t_grid());
  EXPECT_LT(h.flatness, 1e-12);
  EXPECT_LT(rel_err(h.mean, coefficient(3.3)), 1e-13);
}

TEST(HaarProfile, SinLogControlHasFlatnessOneHalf) {
  const auto h = haar_profile(candidates::sin_log_modulated(3), 3, default_t_grid(-5, 5, 201));
  for (const auto& [t, g] : h.samples) EXPECT_NEAR(g, 1 + 0.5 * std::sin(t), 1e-13);
  // Mean of 1 + 0.5 sin t over a symmetric grid is exactly 1.
  EXPECT_NEAR(h.mean, 1.0, 1e-13);
  EXPECT_NEAR(h.flatness, 0.5, 1e-3);
}

TEST(HaarProfile, DegreeMismatchIsNotFlat) {
  const auto h = haar_profile(candidates::classified(2), 3, default_t_grid());
  for (const auto& [t, g] : h.samples) EXPECT_LT(rel_err(g, pi * std::exp(-t / 2)), 1e-13);
  EXPECT_GT(h.flatness, 0.05);
}

TEST(HaarProfile, DegenerateCandidateThrows) {
  CandidateDensity zero{[](double) { return 0.0; }, "zero"};
  EXPECT_THROW(haar_profile(zero, 2, default_t_grid()), DegenerateInputError);
}

TEST(Reconstruct, RecoversDegreeAndConstant) {
  const auto rec = reconstruct(classified_functional(3), tf::tent(0.5, 2.0), {0.5, 1, 2, 4});
  EXPECT_NEAR(rec.degree, 1.5, 1e-6);
  EXPECT_LT(rel_err(rec.constant, coefficient(3)), 1e-6);
}

TEST(Reconstruct, DoubledFunctionalDoublesOnlyTheConstant) {
  const auto twice = classified_functional(2);
  const auto rec = reconstruct([&](const TestFunction& f) { return 2 * twice(f); }, tf::tent(0.5, 2.0), {0.5, 1, 2, 4});
  EXPECT_NEAR(rec.degree, 1.0, 1e-6);
  EXPECT_LT(rel_err(rec.constant, 2 * pi), 1e-6);
}

TEST(Reconstruct, ExponentialIsNotScalingCovariant) {
  EXPECT_THROW(reconstruct(functional_of(candidates::exponential()), tf::tent(0.5, 2.0), {0.5, 1, 2, 4}),
               NotScalingCovariantError);
}

TEST(Reconstruct, NeedsFourLambdas) {
  EXPECT_THROW(reconstruct(classified_functional(3), tf::tent(0.5, 2.0), {0.5, 2, 4}), DomainError);
}

TEST(GammaLawDensity, Examples) {
  for (double u : {0.1, 1.0, 7.5}) {
    EXPECT_LT(rel_err(gamma_law_density(2, u), std::exp(-u)), 1e-14);
    EXPECT_LT(rel_err(gamma_law_density(4, u), u * std::exp(-u)), 1e-14);
  }
  EXPECT_THROW(gamma_law_density(2, 0.0), DomainError);
}

TEST(GammaLawDensity, NormalizedOnZeroToSixty) {
  for (int x = 1; x <= 10; ++x) {
    const Dimension d(x);
    const auto integrand = [d](double t) {
      const double u = std::exp(t);
      return u > 0.0 ? gamma_law_density(d, u) * u : 0.0;
    };
    const auto r = integrate(integrand, -INFINITY,
                             std::log(60.0), QuadratureConfig{});
    EXPECT_NEAR(r.value, 1.0, 1e-9) << x;
  }
}

TEST(AxiomReport, JsonShape) {
  const auto j = to_json(evaluate_axioms(candidates::classified(3), 3));
  EXPECT_EQ(j["verdict"], "passes");
  EXPECT_EQ(j["x"], 3.0);
  for (const char* key : {"label", "x", "scaling_residual", "gaussian_residual", "haar_flatness", "verdict"})
    EXPECT_TRUE(j.contains(key)) << key;
}

// Properties.

TEST(AxiomProperties, Soundness) {
  for (double x : {0.5, 1.0, 2.0, 3.7, 10.0}) {
    const auto r = evaluate_axioms(candidates::classified(x), x);
    EXPECT_LT(r.scaling_residual, 1e-8) << x;
    EXPECT_LT(r.gaussian_residual, 1e-8) << x;
    EXPECT_LT(r.haar_flatness, 1e-10) << x;
    EXPECT_EQ(r.verdict, Verdict::passes) << x;
  }
}

TEST(AxiomProperties, SinLogFailsGenericLambdaButPassesPeriod) {
  const auto w = candidates::sin_log_modulated(3);
  EXPECT_GT(check_scaling_covariance(w, 3, {2.0}, tf::default_probes()).residual, 0.05);
  EXPECT_LT(check_scaling_covariance(w, 3, {std::exp(2 * pi)}, tf::default_probes()).residual, 1e-6);
}

TEST(AxiomProperties, ReconstructInvertsClassification) {
  for (double x : {1.0, 2.0, 3.0, 5.0}) {
    const auto rec = reconstruct(classified_functional(x), tf::tent(0.5, 2.0), {0.5, 1, 2, 4, 10});
    EXPECT_LT(rel_err(rec.degree, x / 2), 1e-6) << x;
    EXPECT_LT(rel_err(rec.constant, coefficient(x)), 1e-6) << x;
  }
}

TEST(AxiomProperties, FlatnessIsScaleFree) {
  for (double c : {1e-3, 0.5, 7.0, 1e4}) {
    const double base = haar_profile(candidates::sin_log_modulated(2.5), 2.5, default_t_grid()).flatness;
    const auto w = candidates::sin_log_modulated(2.5);
    CandidateDensity scaled{[w, c](double u) { return c * w(u); }, "scaled"};
    EXPECT_NEAR(haar_profile(scaled, 2.5, default_t_grid()).flatness, base, 1e-12 * base) << c;
  }
}

}  // namespace
