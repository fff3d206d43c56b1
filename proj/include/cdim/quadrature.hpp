#pragma once

// Globally adaptive 7/15-point Gauss-Kronrod quadrature with breakpoints and
// infinite endpoints, plus the TestFunction type integrated against radial
// measures.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>
#include <utility>
#include <vector>

#include "cdim/errors.hpp"

namespace cdim {

struct QuadratureConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_subdivisions = 2000;
  // Integrate radial integrands in t = log u.
  bool log_substitution = true;

  void validate() const {
    detail::require(rel_tol > 0.0 && abs_tol > 0.0, "quadrature tolerances must be positive");
    detail::require(max_subdivisions >= 1, "max_subdivisions must be >= 1");
  }
};

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int subdivisions = 0;
  int evaluations = 0;
};

enum class Smoothness { continuous, piecewise, singular_at_zero };

/// A real function on (support_lo, support_hi), zero outside. Evaluators must
/// be safe to call concurrently.
struct TestFunction {
  std::function<double(double)> evaluator;
  double support_lo = 0.0;
  double support_hi = std::numeric_limits<double>::infinity();
  Smoothness smoothness_hint = Smoothness::continuous;
  // Interior points where the function has a kink or jump.
  std::vector<double> breakpoints;

  double operator()(double u) const {
    if (!(u > support_lo) || !(u < support_hi)) return 0.0;
    return evaluator(u);
  }

  void validate() const {
    detail::require(static_cast<bool>(evaluator), "test function has no evaluator");
    detail::require(support_lo >= 0.0 && support_lo < support_hi,
                    "test function support must satisfy 0 <= lo < hi");
  }

  /// u -> phi(lambda * u).
  TestFunction dilated(double lambda) const {
    detail::require(lambda > 0.0 && std::isfinite(lambda), "dilation factor must be positive");
    TestFunction out;
    out.evaluator = [f = evaluator, lambda](double u) { return f(lambda * u); };
    out.support_lo = support_lo / lambda;
    out.support_hi = support_hi / lambda;
    out.smoothness_hint = smoothness_hint;
    out.breakpoints.reserve(breakpoints.size());
    for (double b : breakpoints) out.breakpoints.push_back(b / lambda);
    return out;
  }
};

namespace test_functions {

/// Indicator of the open interval (lo, hi).
inline TestFunction indicator(double lo, double hi) {
  TestFunction f;
  f.evaluator = [](double) { return 1.0; };
  f.support_lo = lo;
  f.support_hi = hi;
  f.smoothness_hint = Smoothness::piecewise;
  f.validate();
  return f;
}

/// u^p on (lo, hi).
inline TestFunction monomial(double p, double lo, double hi) {
  TestFunction f;
  f.evaluator = [p](double u) { return std::pow(u, p); };
  f.support_lo = lo;
  f.support_hi = hi;
  f.smoothness_hint = Smoothness::piecewise;
  f.validate();
  return f;
}

/// e^{-u}, truncated at `cutoff` (infinity for no truncation).
inline TestFunction exp_decay(double cutoff = std::numeric_limits<double>::infinity()) {
  TestFunction f;
  f.evaluator = [](double u) { return std::exp(-u); };
  f.support_lo = 0.0;
  f.support_hi = cutoff;
  f.validate();
  return f;
}

/// Continuous tent rising from lo to a peak of 1 at the midpoint.
inline TestFunction tent(double lo, double hi) {
  detail::require(lo >= 0.0 && lo < hi, "tent needs 0 <= lo < hi");
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  TestFunction f;
  f.evaluator = [mid, half](double u) { return std::max(0.0, 1.0 - std::abs(u - mid) / half); };
  f.support_lo = lo;
  f.support_hi = hi;
  f.breakpoints = {mid};
  return f;
}

/// Five tents whose supports together span [0.1, 10].
inline std::vector<TestFunction> default_probes() {
  return {tent(0.1, 0.5), tent(0.3, 1.5), tent(1.0, 3.0), tent(2.0, 6.0), tent(4.0, 10.0)};
}

/// Linear interpolation through (u_i, phi_i), zero outside [u_0, u_last].
inline TestFunction piecewise_linear(std::vector<double> us, std::vector<double> phis) {
  detail::require(us.size() == phis.size() && us.size() >= 2, "knot lists must match and have >= 2 knots");
  detail::require(us.front() >= 0.0, "knot abscissae must be >= 0");
  for (std::size_t i = 1; i < us.size(); ++i)
    detail::require(us[i] > us[i - 1], "knot abscissae must be strictly increasing");
  for (double v : phis) detail::require(std::isfinite(v), "knot values must be finite");
  TestFunction f;
  f.support_lo = us.front();
  f.support_hi = us.back();
  f.smoothness_hint = Smoothness::piecewise;
  f.breakpoints.assign(us.begin() + 1, us.end() - 1);
  f.evaluator = [us = std::move(us), phis = std::move(phis)](double u) {
    auto it = std::upper_bound(us.begin(), us.end(), u);
    if (it == us.begin() || it == us.end()) return u == us.back() ? phis.back() : 0.0;
    const std::size_t i = static_cast<std::size_t>(it - us.begin());
    const double w = (u - us[i - 1]) / (us[i] - us[i - 1]);
    return phis[i - 1] + w * (phis[i] - phis[i - 1]);
  };
  return f;
}

}  // namespace test_functions

namespace detail {

struct KronrodSegment {
  double a, b, value, error;
  bool operator<(const KronrodSegment& o) const { return error < o.error; }
};

inline constexpr std::array<double, 8> gk_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> gk_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
KronrodSegment kronrod15(const F& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(centre);
  double res_g = fc * gauss_weights[3];
  double res_k = fc * gk_weights[7];
  double res_abs = std::abs(res_k);
  std::array<double, 7> f1{}, f2{};
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * gk_nodes[j];
    f1[j] = f(centre - dx);
    f2[j] = f(centre + dx);
    res_k += gk_weights[j] * (f1[j] + f2[j]);
    res_abs += gk_weights[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) res_g += gauss_weights[j / 2] * (f1[j] + f2[j]);
  }
  const double mean = 0.5 * res_k;
  double res_asc = gk_weights[7] * std::abs(fc - mean);
  for (std::size_t j = 0; j < 7; ++j) res_asc += gk_weights[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  const double abs_half = std::abs(half);
  res_abs *= abs_half;
  res_asc *= abs_half;
  double err = std::abs((res_k - res_g) * half);
  if (res_asc != 0.0 && err != 0.0) err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (res_abs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * res_abs, err);
  return {a, b, res_k * half, err};
}

}  // namespace detail

/// Adaptive integral of f over [a, b], where either end may be infinite.
/// `breakpoints` (any order, those outside (a, b) ignored) seed the initial
/// partition. Throws ConvergenceError with the best estimate when the
/// tolerance is not met within cfg.max_subdivisions.
template <class F>
QuadResult integrate(const F& f, double a, double b, const QuadratureConfig& cfg,
                     std::vector<double> breakpoints = {}) {
  cfg.validate();
  detail::require(!std::isnan(a) && !std::isnan(b) && a < b, "integration limits must satisfy a < b");
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (a == -inf && b == inf) {
    const QuadResult lo = integrate(f, -inf, 0.0, cfg, breakpoints);
    const QuadResult hi = integrate(f, 0.0, inf, cfg, breakpoints);
    return {lo.value + hi.value, lo.error_estimate + hi.error_estimate, lo.subdivisions + hi.subdivisions,
            lo.evaluations + hi.evaluations};
  }

  // Map to a finite interval in v; infinite ends use t = b - (1-v)/v or
  // t = a + (1-v)/v with v in (0, 1].
  std::function<double(double)> g;
  std::function<double(double)> to_v;
  double va = a, vb = b;
  if (a == -inf) {
    g = [&f, b](double v) { return f(b - (1.0 - v) / v) / (v * v); };
    to_v = [b](double t) { return 1.0 / (1.0 + (b - t)); };
    va = 0.0;
    vb = 1.0;
  } else if (b == inf) {
    // v runs 1 -> 0 as t runs a -> inf; integrate over v in (0, 1].
    g = [&f, a](double v) { return f(a + (1.0 - v) / v) / (v * v); };
    to_v = [a](double t) { return 1.0 / (1.0 + (t - a)); };
    va = 0.0;
    vb = 1.0;
  } else {
    g = [&f](double t) { return f(t); };
    to_v = [](double t) { return t; };
  }

  std::vector<double> cuts;
  for (double p : breakpoints)
    if (p > a && p < b) cuts.push_back(to_v(p));
  cuts.push_back(va);
  cuts.push_back(vb);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<detail::KronrodSegment> heap;
  double total = 0.0, total_err = 0.0;
  int evaluations = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    auto seg = detail::kronrod15(g, cuts[i], cuts[i + 1]);
    evaluations += 15;
    total += seg.value;
    total_err += seg.error;
    heap.push(seg);
  }
  int subdivisions = static_cast<int>(heap.size());
  auto tolerance = [&] { return std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total)); };

  while (total_err > tolerance()) {
    if (!std::isfinite(total) || !std::isfinite(total_err)) {
      throw ConvergenceError("quadrature produced a non-finite value", total, total_err);
    }
    if (subdivisions >= cfg.max_subdivisions) {
      std::ostringstream os;
      os << "quadrature did not converge in " << cfg.max_subdivisions << " subdivisions (estimate " << total
         << ", error bound " << total_err << ")";
      throw ConvergenceError(os.str(), total, total_err);
    }
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw ConvergenceError("quadrature interval underflow before reaching tolerance", total, total_err);
    }
    const auto left = detail::kronrod15(g, worst.a, mid);
    const auto right = detail::kronrod15(g, mid, worst.b);
    evaluations += 30;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++subdivisions;
  }
  // Re-sum to shed the drift of incremental updates.
  double sum = 0.0, err = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return {sum, err, subdivisions, evaluations};
}

}  // namespace cdim
