#pragma once

// Numerical checks of the two radial-integration axioms (scaling covariance
// of degree x/2, Gaussian normalization to pi^{x/2}) for candidate densities,
// the log-coordinate flatness diagnostic, and recovery of (degree, constant)
// from a black-box functional.
//
// A finite probe set can certify failure of an axiom but only gives evidence
// of compliance.

#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cdim/errors.hpp"
#include "cdim/gamma.hpp"
#include "cdim/quadrature.hpp"
#include "cdim/radial_measure.hpp"

namespace cdim {

/// A nonnegative density w on (0, inf) standing in for an unknown measure.
struct CandidateDensity {
  std::function<double(double)> evaluator;
  std::string label;

  double operator()(double u) const { return evaluator(u); }
};

namespace candidates {

/// The classified density C(x) u^{x/2-1}, optionally scaled by c.
inline CandidateDensity classified(Dimension x, double c = 1.0) {
  const double lc = ln_coefficient(x) + std::log(c);
  const double e = x.half() - 1.0;
  std::ostringstream label;
  label << "mu_" << x.value();
  if (c != 1.0) label << " x " << c;
  return {[lc, e](double u) { return std::exp(lc + e * std::log(u)); }, label.str()};
}

/// c u^{a-1}: scaling-covariant of degree a with an arbitrary constant.
inline CandidateDensity power_law(double a, double c = 1.0) {
  std::ostringstream label;
  label << c << " u^(" << a << "-1)";
  return {[a, c](double u) { return c * std::pow(u, a - 1.0); }, label.str()};
}

/// u^{x/2-1} (1 + amp sin(log u)): invariant only under lambda = e^{2 pi k}.
inline CandidateDensity sin_log_modulated(Dimension x, double amp = 0.5) {
  const double e = x.half() - 1.0;
  std::ostringstream label;
  label << "u^(x/2-1)(1+" << amp << " sin log u)";
  return {[e, amp](double u) { return std::pow(u, e) * (1.0 + amp * std::sin(std::log(u))); }, label.str()};
}

inline CandidateDensity exponential() {
  return {[](double u) { return std::exp(-u); }, "exp(-u)"};
}

}  // namespace candidates

enum class Verdict { passes, fails_scaling, fails_normalization, fails_both };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::passes: return "passes";
    case Verdict::fails_scaling: return "fails_scaling";
    case Verdict::fails_normalization: return "fails_normalization";
    case Verdict::fails_both: return "fails_both";
  }
  return "unknown";
}

struct AxiomReport {
  std::string label;
  double x = 0.0;
  double scaling_residual = 0.0;
  double gaussian_residual = 0.0;
  double haar_flatness = 0.0;
  Verdict verdict = Verdict::passes;
  std::vector<std::string> warnings;
};

inline nlohmann::ordered_json to_json(const AxiomReport& r) {
  nlohmann::ordered_json j;
  j["label"] = r.label;
  j["x"] = r.x;
  j["scaling_residual"] = r.scaling_residual;
  j["gaussian_residual"] = r.gaussian_residual;
  j["haar_flatness"] = r.haar_flatness;
  j["verdict"] = to_string(r.verdict);
  return j;
}

/// int phi(u) w(u) du over the support of phi, in t = log u.
inline QuadResult integrate_against(const CandidateDensity& w, const TestFunction& phi,
                                    const QuadratureConfig& cfg = {}) {
  phi.validate();
  const double t_lo = phi.support_lo > 0.0 ? std::log(phi.support_lo) : -std::numeric_limits<double>::infinity();
  const double t_hi = std::log(phi.support_hi);
  std::vector<double> cuts;
  for (double b : phi.breakpoints)
    if (b > 0.0) cuts.push_back(std::log(b));
  auto integrand = [&](double t) {
    const double u = std::exp(t);
    const double v = phi(u);
    if (v == 0.0) return 0.0;
    return v * w(u) * u;
  };
  return integrate(integrand, t_lo, t_hi, cfg, cuts);
}

struct ScalingCheck {
  double residual = 0.0;
  std::vector<std::string> warnings;
};

/// max over (lambda, phi) of |lambda^{x/2} int phi(lambda u) w - int phi w| / |int phi w|.
inline ScalingCheck check_scaling_covariance(const CandidateDensity& w, Dimension x,
                                             const std::vector<double>& lambdas,
                                             const std::vector<TestFunction>& probes,
                                             const QuadratureConfig& cfg = {}) {
  detail::require(!lambdas.empty() && !probes.empty(), "scaling check needs lambdas and probes");
  ScalingCheck out;
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const auto& phi = probes[p];
    detail::require(std::isfinite(phi.support_hi), "scaling probes must be compactly supported");
    const double base = integrate_against(w, phi, cfg).value;
    if (!(std::abs(base) > 0.0)) {
      out.warnings.push_back("probe " + std::to_string(p) + " has zero integral; skipped");
      continue;
    }
    for (double lambda : lambdas) {
      detail::require(lambda > 0.0, "scaling factors must be positive");
      const double scaled = integrate_against(w, phi.dilated(lambda), cfg).value;
      const double r = std::abs(std::pow(lambda, x.half()) * scaled - base) / std::abs(base);
      out.residual = std::max(out.residual, r);
    }
  }
  return out;
}

/// |int e^{-u} w(u) du - pi^{x/2}| / pi^{x/2}.
inline double check_gaussian_normalization(const CandidateDensity& w, Dimension x, const QuadratureConfig& cfg = {}) {
  const auto probe = test_functions::exp_decay();
  QuadResult r;
  try {
    r = integrate_against(w, probe, cfg);
  } catch (const ConvergenceError& e) {
    throw DivergenceError(std::string("Gaussian probe integral of '") + w.label +
                          "' does not converge: " + e.what());
  }
  if (!std::isfinite(r.value)) throw DivergenceError("Gaussian probe integral of '" + w.label + "' is not finite");
  const double target = std::exp(x.half() * log_pi);
  return std::abs(r.value - target) / target;
}

struct HaarProfile {
  std::vector<std::pair<double, double>> samples;  // (t, g(t))
  double mean = 0.0;
  double flatness = 0.0;  // max |g - mean| / mean
};

/// Default grid: 121 points on [-6, 6].
inline std::vector<double> default_t_grid(double lo = -6.0, double hi = 6.0, int points = 121) {
  detail::require(points >= 2 && lo < hi, "t grid needs >= 2 points and lo < hi");
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
  return g;
}

/// g(t) = e^{-(x/2) t} w(e^t) e^t, the density in t = log u after removing
/// the expected exponential. Constant exactly when w = c u^{x/2-1}.
inline HaarProfile haar_profile(const CandidateDensity& w, Dimension x, const std::vector<double>& t_grid) {
  detail::require(!t_grid.empty(), "haar_profile needs a non-empty grid");
  HaarProfile out;
  bool any_nonzero = false;
  for (double t : t_grid) {
    const double g = std::exp((1.0 - x.half()) * t) * w(std::exp(t));
    if (g != 0.0) any_nonzero = true;
    out.samples.emplace_back(t, g);
  }
  if (!any_nonzero) throw DegenerateInputError("candidate '" + w.label + "' vanishes on the whole t grid");
  double sum = 0.0;
  for (const auto& s : out.samples) sum += s.second;
  out.mean = sum / static_cast<double>(out.samples.size());
  for (const auto& s : out.samples) out.flatness = std::max(out.flatness, std::abs(s.second - out.mean));
  out.flatness /= std::abs(out.mean);
  return out;
}

struct AxiomCheckOptions {
  std::vector<double> lambdas = {0.5, 2.0, 10.0};
  std::vector<TestFunction> probes = test_functions::default_probes();
  std::vector<double> t_grid = default_t_grid();
  QuadratureConfig quadrature{};
  // Residuals at or below this count as compliance.
  double pass_threshold = 1e-6;
};

/// Runs both axiom checks and the flatness diagnostic.
inline AxiomReport evaluate_axioms(const CandidateDensity& w, Dimension x, const AxiomCheckOptions& opts = {}) {
  AxiomReport r;
  r.label = w.label;
  r.x = x.value();
  auto sc = check_scaling_covariance(w, x, opts.lambdas, opts.probes, opts.quadrature);
  r.scaling_residual = sc.residual;
  r.warnings = std::move(sc.warnings);
  r.gaussian_residual = check_gaussian_normalization(w, x, opts.quadrature);
  r.haar_flatness = haar_profile(w, x, opts.t_grid).flatness;
  const bool scaling_ok = r.scaling_residual <= opts.pass_threshold;
  const bool norm_ok = r.gaussian_residual <= opts.pass_threshold;
  r.verdict = scaling_ok ? (norm_ok ? Verdict::passes : Verdict::fails_normalization)
                         : (norm_ok ? Verdict::fails_scaling : Verdict::fails_both);
  return r;
}

/// A positive linear functional on test functions, treated as a black box.
using BlackBoxFunctional = std::function<double(const TestFunction&)>;

inline BlackBoxFunctional functional_of(CandidateDensity w, QuadratureConfig cfg = {}) {
  return [w = std::move(w), cfg](const TestFunction& phi) { return integrate_against(w, phi, cfg).value; };
}

/// I_x itself.
inline BlackBoxFunctional classified_functional(Dimension x, QuadratureConfig cfg = {}) {
  return [x, cfg](const TestFunction& phi) { return integrate_functional(x, phi, cfg).value; };
}

struct Reconstruction {
  double degree;       // a_hat, expected x/2
  double constant;     // C_hat, expected C(x)
  double fit_residual; // max deviation of the log response from the fitted line
};

/// Recovers the scaling degree a from log I(phi(lambda .)) = log I(phi) - a log lambda
/// by least squares through the origin, then the constant from the Gaussian
/// probe: C = I(e^{-u}) / Gamma(a). Throws NotScalingCovariantError when the
/// log response is not linear in log lambda to within `linearity_tol`.
inline Reconstruction reconstruct(const BlackBoxFunctional& functional, const TestFunction& probe,
                                  const std::vector<double>& lambdas, double linearity_tol = 1e-6) {
  detail::require(lambdas.size() >= 4, "reconstruct needs at least four lambdas");
  const double base = functional(probe);
  detail::require(base > 0.0, "reconstruct needs a probe with positive integral");
  const double log_base = std::log(base);
  std::vector<double> xs, ys;
  for (double lambda : lambdas) {
    detail::require(lambda > 0.0, "scaling factors must be positive");
    const double v = functional(probe.dilated(lambda));
    detail::require(v > 0.0, "functional returned a non-positive value on a positive probe");
    xs.push_back(std::log(lambda));
    ys.push_back(log_base - std::log(v));
  }
  const double sxx = std::inner_product(xs.begin(), xs.end(), xs.begin(), 0.0);
  detail::require(sxx > 0.0, "lambdas must not all equal 1");
  const double a_hat = std::inner_product(xs.begin(), xs.end(), ys.begin(), 0.0) / sxx;
  double resid = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) resid = std::max(resid, std::abs(ys[i] - a_hat * xs[i]));
  if (resid > linearity_tol || !(a_hat > 0.0)) {
    std::ostringstream os;
    os << "functional is not scaling-covariant: log response deviates from a power law by " << resid
       << " (fitted degree " << a_hat << ")";
    throw NotScalingCovariantError(os.str(), resid);
  }
  // Truncate e^{-u} where the dropped tail is below 1e-16 relative.
  double cutoff = 40.0;
  while (exp_probe_tail_bound(a_hat, cutoff) > 1e-16 * gamma(a_hat)) cutoff *= 1.5;
  const double gauss = functional(test_functions::exp_decay(cutoff));
  return {a_hat, gauss / gamma(a_hat), resid};
}

/// Gamma(x/2, 1) density u^{x/2-1} e^{-u} / Gamma(x/2).
inline double gamma_law_density(Dimension x, double u) {
  if (!(u > 0.0) || !std::isfinite(u)) {
    std::ostringstream os;
    os << "gamma_law_density: u must be positive and finite, got " << u;
    throw DomainError(os.str());
  }
  return std::exp((x.half() - 1.0) * std::log(u) - u - ln_gamma(x.half()));
}

}  // namespace cdim
