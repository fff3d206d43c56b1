#pragma once

// Machine-readable invariant suite. Every check is seeded, so the report is a
// pure function of the library build.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cdim/axiom_lab.hpp"
#include "cdim/bm_counterexample.hpp"
#include "cdim/bm_route.hpp"
#include "cdim/gamma.hpp"
#include "cdim/homogeneous_polar.hpp"
#include "cdim/philox.hpp"
#include "cdim/radial_measure.hpp"
#include "cdim/shift_cocycles.hpp"

namespace cdim::selftest {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;      // worst observed metric
  double threshold = 0.0;  // pass iff value < threshold (or >= for lower bounds)
  std::string error;       // non-empty when the check threw
};

struct Report {
  std::vector<CheckResult> checks;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }
  const CheckResult* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

inline nlohmann::ordered_json to_json(const Report& r) {
  nlohmann::ordered_json j;
  j["passed"] = r.passed();
  std::size_t failures = 0;
  for (const auto& c : r.checks) failures += c.passed ? 0 : 1;
  j["failures"] = failures;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["passed"] = c.passed;
    e["value"] = c.value;
    e["threshold"] = c.threshold;
    if (!c.error.empty()) e["error"] = c.error;
    j["checks"].push_back(std::move(e));
  }
  return j;
}

namespace detail {

constexpr double pi = std::numbers::pi;

inline double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

// Runs `metric` and compares against an upper bound (or a lower bound when
// `at_least` is set). Exceptions become failed checks.
inline CheckResult run(const std::string& name, double threshold, const std::function<double()>& metric,
                       bool at_least = false) {
  CheckResult c{name, false, 0.0, threshold, {}};
  try {
    c.value = metric();
    c.passed = at_least ? c.value >= threshold : c.value < threshold;
  } catch (const std::exception& e) {
    c.error = e.what();
    c.value = std::numeric_limits<double>::quiet_NaN();
  }
  return c;
}

inline std::vector<double> half_grid() {
  std::vector<double> xs;
  for (int k = 1; k <= 20; ++k) xs.push_back(0.5 * k);
  return xs;
}

struct Triple {
  double x, r, s;
};

inline std::vector<Triple> cocycle_triples(std::uint64_t seed) {
  PhiloxStream rng(seed, 0);
  std::vector<Triple> out;
  for (int i = 0; i < 200; ++i) {
    const double x = 20.0 * (1.0 - rng.uniform());
    const double r = rng.uniform(-x / 4, 5.0);
    const double s = rng.uniform(-x / 4, 5.0);
    out.push_back({x, r, s});
  }
  return out;
}

}  // namespace detail

/// Runs every invariant. `polar_samples` sets the Monte Carlo size for the
/// homogeneous-polar checks.
inline Report run_all(std::int64_t polar_samples = 1000000) {
  using detail::rel;
  using detail::run;
  using detail::pi;
  namespace tf = test_functions;
  Report rep;
  auto add = [&rep](CheckResult c) { rep.checks.push_back(std::move(c)); };

  // gamma_core
  add(run("gamma.recurrence", 1e-12, [] {
    double worst = 0.0;
    for (int i = 1; i <= 1000; ++i) {
      const double x = 0.05 * i;
      const double lhs = gamma(x + 1.0);
      worst = std::max(worst, std::abs(lhs - x * gamma(x)) / lhs);
    }
    return worst;
  }));
  add(run("gamma.euler_limit_oracle", 1e-7, [] {
    PhiloxStream rng(2024, 0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double x = rng.uniform(0.1, 10.0);
      const double r = rng.uniform(0.0, 1.0);
      worst = std::max(worst, rel(gamma_ratio({x, r}), euler_limit_extrapolated(x, r, 100000)));
    }
    return worst;
  }));
  add(run(
      "gamma.log_convexity", -1e-10,
      [] {
        double worst = std::numeric_limits<double>::infinity();
        for (int i = 1; i + 2 <= 1000; ++i) {
          const double x = 0.1 * i;
          worst = std::min(worst, ln_gamma(x + 0.2) - 2.0 * ln_gamma(x + 0.1) + ln_gamma(x));
        }
        return worst;
      },
      true));

  // radial_measure
  add(run("radial.quadrature_vs_closed_form", 1e-9, [] {
    double worst = 0.0;
    for (double x : detail::half_grid())
      worst = std::max(worst, rel(integrate_functional(x, tf::indicator(0, 1)).value, ball_volume(x)));
    return worst;
  }));
  add(run("radial.gaussian_axiom", 1e-8, [] {
    double worst = 0.0;
    for (double x : detail::half_grid())
      worst = std::max(worst, rel(integrate_functional(x, tf::exp_decay(40)).value, std::pow(pi, x / 2)));
    return worst;
  }));
  add(run("radial.mellin_identity", 1e-8, [] {
    PhiloxStream rng(7, 0);
    const auto xs = detail::half_grid();
    double worst = 0.0;
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
      const double x = xs[static_cast<std::size_t>(rng.uniform() * static_cast<double>(xs.size()))];
      worst = std::max(worst, rel(integrate_functional(x, phi).value, coefficient(x) * mellin_transform(phi, x / 2).value));
    }
    return worst;
  }));
  add(run("radial.volume_coefficient_relation", 1e-14, [] {
    double worst = 0.0;
    for (double x = 0.1; x <= 1000.0; x *= 1.3) {
      const double lv = ln_ball_volume(x);
      worst = std::max(worst, std::abs(lv - (std::log(2.0 / x) + ln_coefficient(x))) / std::max(1.0, std::abs(lv)));
    }
    return worst;
  }));
  add(run("radial.sublevel_mass", 1e-9, [] {
    double worst = 0.0;
    for (double x : {0.5, 2.0, 3.7, 9.0})
      for (double a : {0.2, 1.0, 3.5})
        worst = std::max(worst, rel(integrate_functional(x, tf::indicator(0, a)).value, sublevel_mass(a, x)));
    return worst;
  }));
  add(run("radial.gaussian_second_moment", 1e-13, [] {
    double worst = 0.0;
    for (int n = 1; n <= 8; ++n) worst = std::max(worst, rel(gaussian_moment(1.0, n), std::pow(pi, n / 2.0) * n / 2.0));
    return worst;
  }));

  // axiom_lab
  add(run("axiom.soundness", 1e-8, [] {
    double worst = 0.0;
    for (double x : {0.5, 1.0, 2.0, 3.7, 10.0}) {
      const auto r = evaluate_axioms(candidates::classified(x), x);
      // Flatness has a 100x tighter bound than the residuals.
      worst = std::max({worst, r.scaling_residual, r.gaussian_residual, r.haar_flatness * 100.0});
    }
    return worst;
  }));
  add(run(
      "axiom.sin_log_fails_generic_lambda", 0.05,
      [] {
        return check_scaling_covariance(candidates::sin_log_modulated(3), 3, {2.0}, tf::default_probes()).residual;
      },
      true));
  add(run("axiom.sin_log_passes_period", 1e-6, [] {
    return check_scaling_covariance(candidates::sin_log_modulated(3), 3, {std::exp(2 * pi)}, tf::default_probes())
        .residual;
  }));
  add(run("axiom.reconstruct", 1e-6, [] {
    double worst = 0.0;
    for (double x : {1.0, 2.0, 3.0, 5.0}) {
      const auto rec = reconstruct(classified_functional(x), tf::tent(0.5, 2.0), {0.5, 1, 2, 4, 10});
      worst = std::max({worst, rel(rec.degree, x / 2), rel(rec.constant, coefficient(x))});
    }
    return worst;
  }));
  add(run("axiom.flatness_scale_free", 1e-12, [] {
    const auto w = candidates::sin_log_modulated(2.5);
    const double base = haar_profile(w, 2.5, default_t_grid()).flatness;
    double worst = 0.0;
    for (double c : {1e-3, 0.5, 7.0, 1e4}) {
      CandidateDensity scaled{[w, c](double u) { return c * w(u); }, "scaled"};
      worst = std::max(worst, rel(haar_profile(scaled, 2.5, default_t_grid()).flatness, base));
    }
    return worst;
  }));

  // shift_cocycles
  add(run("cocycle.law", 1e-12, [] {
    double worst = 0.0;
    for (const auto& t : detail::cocycle_triples(11))
      worst = std::max({worst, cocycle_residual(CocycleKind::radial(), t.x, t.r, t.s),
                        cocycle_residual(CocycleKind::ball(), t.x, t.r, t.s)});
    return worst;
  }));
  add(run("cocycle.coboundary", 1e-13, [] {
    double worst = 0.0;
    for (const auto& t : detail::cocycle_triples(12)) {
      const ShiftPair p(t.x, t.r);
      worst = std::max(worst, rel(transport_R(p) / transport_T(p), coboundary_ratio(p)));
    }
    return worst;
  }));
  add(run("cocycle.ball_volume_consistency", 1e-13, [] {
    double worst = 0.0;
    for (const auto& t : detail::cocycle_triples(13)) {
      const ShiftPair p(t.x, t.r);
      worst = std::max(worst, rel(transport_T(p) * ball_volume(t.x), ball_volume(p.target())));
    }
    return worst;
  }));
  add(run("cocycle.character_twist", 1e-13, [] {
    PhiloxStream rng(14, 0);
    double worst = 0.0;
    for (const auto& t : detail::cocycle_triples(14)) {
      const double a = std::exp(rng.uniform(-3, 3));
      const ShiftPair p(t.x, t.r);
      worst = std::max({worst, rel(transport_Ta(a, p) / transport_T(p), std::pow(a, t.r)),
                        rel(character_coboundary(a, p), std::pow(a, t.r))});
    }
    return worst;
  }));
  add(run("cocycle.volume_recurrence", 1e-13, [] {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) worst = std::max(worst, recurrence_check(0.1 + 0.5 * i));
    return worst;
  }));

  // bm_route
  add(run("bm.route_agreement", 1e-6, [] {
    double worst = 0.0;
    for (double x : {0.5, 1.0, 2.0, 3.0, 7.0})
      for (double r : {0.25, 0.5, 0.75}) worst = std::max(worst, rel(bm::bm_transport(x, r, 10000), transport_T({x, r})));
    return worst;
  }));
  add(run("bm.convergence_order", 0.5, [] {
    // Distance of the per-doubling error ratio from 4, worst case.
    double worst = 0.0;
    for (double x : {0.5, 3.0, 7.0}) {
      for (double r : {0.25, 0.5, 0.75}) {
        const double exact = transport_T({x, r});
        double prev = std::abs(bm::bm_transport(x, r, 50) - exact);
        for (std::int64_t n = 100; n <= 800; n *= 2) {
          const double err = std::abs(bm::bm_transport(x, r, n) - exact);
          worst = std::max(worst, std::abs(prev / err - 4.0));
          prev = err;
        }
      }
    }
    return worst;
  }));
  add(run("bm.recurrence", 1e-6, [] {
    return std::max({bm::bm_recurrence_residual(2.0, 1.0), bm::bm_recurrence_residual(5.0, 2.5),
                     bm::bm_recurrence_residual(1.0, 0.3)});
  }));
  add(run(
      "bm.counterexample_detected", 0.01,
      [] {
        const auto grid = bm::uniform_grid(0.0, 3.0, 0.05);
        // Positive iff the perturbed G is non-convex and the unperturbed one is convex.
        const double bad = bm::log_convexity_check(bm::counterexample_G(1.0, 0.3, grid)).min_second_difference;
        const double good = bm::log_convexity_check(bm::counterexample_G(1.0, 0.0, grid)).min_second_difference;
        return good >= -1e-10 ? -bad : -1.0;
      },
      true));

  // homogeneous_polar
  const std::vector<HomogeneousGauge> gauges = {gauge_euclidean(1),           gauge_euclidean(2),
                                                gauge_euclidean(3),           gauge_diagonal_power({2, 4}),
                                                gauge_diagonal_power({3, 3}), gauge_diagonal_power({1, 2, 4})};
  add(run("polar.homogeneity", 1e-9, [&gauges] {
    double worst = 0.0;
    for (const auto& p : gauges) worst = std::max(worst, homogeneity_defect(p, 1000, 99));
    return worst;
  }));
  add(run("polar.dilation_group_law", 1e-10, [] {
    Eigen::MatrixXd sym(2, 2), shear(2, 2);
    sym << 1.0, 0.3, 0.3, 0.6;
    shear << 1.0, 0.7, 0.3, 2.0;
    const std::vector<DilationGenerator> gens = {DilationGenerator::diagonal({0.5, 0.25}), DilationGenerator(sym),
                                                 DilationGenerator(shear)};
    PhiloxStream rng(31, 0);
    double worst = 0.0;
    for (const auto& g : gens) {
      for (int i = 0; i < 100; ++i) {
        const double r = std::exp(rng.uniform(-2, 2)), s = std::exp(rng.uniform(-2, 2));
        Eigen::VectorXd xi(2);
        xi << rng.uniform(-1, 1), rng.uniform(-1, 1);
        const Eigen::VectorXd lhs = dilate(g, r, dilate(g, s, xi));
        const Eigen::VectorXd rhs = dilate(g, r * s, xi);
        worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff() / rhs.cwiseAbs().maxCoeff());
      }
    }
    return worst;
  }));
  add(run("polar.reproducibility", 0.5, [] {
    const auto p = gauge_diagonal_power({2, 4});
    const auto a = mc_ball_volume(p, {1.1, 1.1}, 100000, 42, {64, 1});
    const auto b = mc_ball_volume(p, {1.1, 1.1}, 100000, 42, {64, 4});
    return a.mean == b.mean && a.std_error == b.std_error ? 0.0 : 1.0;
  }));
  add(run("polar.gamma_identity", 3.0, [&gauges, polar_samples] {
    double worst = 0.0;
    std::uint64_t seed = 100;
    for (const auto& p : gauges) worst = std::max(worst, gamma_identity_check(p, polar_samples, seed++).z_score);
    return worst;
  }));
  add(run("polar.rotational_specialization", 3.0, [polar_samples] {
    double worst = 0.0;
    for (std::size_t d = 1; d <= 3; ++d) {
      const auto p = gauge_euclidean(d);
      const auto s = surface_mass(p, suggest_truncation_radius(p, 1e-9), polar_samples, 200 + d);
      worst = std::max(worst, cdim::detail::z_score(s.mean - sphere_area(static_cast<double>(d)), s.std_error));
    }
    return worst;
  }));

  return rep;
}

}  // namespace cdim::selftest
