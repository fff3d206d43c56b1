#pragma once

// The Mellin-Gamma radial measure
//
//   d mu_x(u) = C(x) u^{x/2 - 1} du,   C(x) = pi^{x/2} / Gamma(x/2),
//
// its closed-form observables, and quadrature against it. Every closed form
// is assembled in log space and exponentiated last, so large x underflows
// gracefully instead of producing inf/inf.

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cdim/errors.hpp"
#include "cdim/gamma.hpp"
#include "cdim/quadrature.hpp"

namespace cdim {

/// Continuous-dimension parameter x > 0.
class Dimension {
 public:
  Dimension(double x) : x_(x) {  // NOLINT(google-explicit-constructor)
    if (!(x > 0.0) || !std::isfinite(x)) {
      std::ostringstream os;
      os << "dimension must be positive and finite, got " << x;
      throw DomainError(os.str());
    }
  }
  double value() const noexcept { return x_; }
  double half() const noexcept { return 0.5 * x_; }

 private:
  double x_;
};

inline const double log_pi = std::log(std::numbers::pi);

inline double ln_coefficient(Dimension x) { return x.half() * log_pi - ln_gamma(x.half()); }

/// C(x) = pi^{x/2} / Gamma(x/2).
inline double coefficient(Dimension x) { return std::exp(ln_coefficient(x)); }

inline double ln_ball_volume(Dimension x) { return x.half() * log_pi - ln_gamma(x.half() + 1.0); }

/// V(x) = pi^{x/2} / Gamma(x/2 + 1), the unit-ball volume.
inline double ball_volume(Dimension x) { return std::exp(ln_ball_volume(x)); }

/// 2 C(x); the unit-sphere area at integer x.
inline double sphere_area(Dimension x) { return 2.0 * coefficient(x); }

/// C(x) u^{x/2-1}.
inline double density(Dimension x, double u) {
  if (!(u > 0.0) || !std::isfinite(u)) {
    std::ostringstream os;
    os << "density: u must be positive and finite, got " << u;
    throw DomainError(os.str());
  }
  return std::exp(ln_coefficient(x) + (x.half() - 1.0) * std::log(u));
}

/// The measure mu_x as a value: dimension plus its normalizing constant.
struct RadialMeasure {
  Dimension dim;
  double coeff;

  static RadialMeasure of(Dimension x) { return {x, coefficient(x)}; }
  double density(double u) const { return cdim::density(dim, u); }
};

/// F_a(x) = mu_x((0, a)) = a^{x/2} V(x).
inline double sublevel_mass(double a, Dimension x) {
  detail::require(a > 0.0 && std::isfinite(a), "sublevel_mass: a must be positive");
  return std::exp(x.half() * std::log(a) + ln_ball_volume(x));
}

/// M_q(x) = int u^q e^{-u} d mu_x = pi^{x/2} Gamma(x/2 + q) / Gamma(x/2).
inline double gaussian_moment(double q, Dimension x) {
  const GammaRatioQuery query(x.half(), q);
  if (q == std::nearbyint(q) && std::abs(q) <= 16.0)
    return std::exp(x.half() * log_pi) * gamma_ratio(query);
  return std::exp(x.half() * log_pi + ln_gamma_ratio(query));
}

namespace detail {

// Rejects infinite-range integrands of the form phi(u) u^{s} that do not go
// to zero at either end of the support.
inline void check_endpoint_decay(const TestFunction& phi, double s) {
  if (std::isinf(phi.support_hi)) {
    double last = 0.0;
    for (double u = 1e4; u <= 1e12; u *= 100.0) last = std::abs(phi(u)) * std::pow(u, s);
    if (!(last < 1e-6) || !std::isfinite(last)) {
      std::ostringstream os;
      os << "integrand phi(u) u^" << s << " does not decay at u -> inf (|value| " << last
         << " at u = 1e12); truncate the support";
      throw DivergenceError(os.str());
    }
  }
  if (phi.support_lo == 0.0 && s <= 0.0) {
    const double near_zero = std::abs(phi(1e-12)) * std::pow(1e-12, s);
    if (!(near_zero < 1e-6)) {
      std::ostringstream os;
      os << "integrand phi(u) u^" << s << " is not integrable at u -> 0";
      throw DivergenceError(os.str());
    }
  }
}

// int phi(u) u^{s-1} du, optionally in t = log u. `ln_scale` multiplies the
// integrand by e^{ln_scale} inside the exponential.
inline QuadResult power_weighted_integral(const TestFunction& phi, double s, double ln_scale,
                                          const QuadratureConfig& cfg) {
  phi.validate();
  check_endpoint_decay(phi, s);
  if (cfg.log_substitution) {
    const double t_lo = phi.support_lo > 0.0 ? std::log(phi.support_lo) : -std::numeric_limits<double>::infinity();
    const double t_hi = std::log(phi.support_hi);
    std::vector<double> cuts;
    for (double b : phi.breakpoints)
      if (b > 0.0) cuts.push_back(std::log(b));
    auto integrand = [&phi, s, ln_scale](double t) {
      const double v = phi(std::exp(t));
      if (v == 0.0) return 0.0;
      return v * std::exp(s * t + ln_scale);
    };
    return integrate(integrand, t_lo, t_hi, cfg, cuts);
  }
  auto integrand = [&phi, s, ln_scale](double u) {
    const double v = phi(u);
    if (v == 0.0) return 0.0;
    return v * std::exp((s - 1.0) * std::log(u) + ln_scale);
  };
  return integrate(integrand, phi.support_lo, phi.support_hi, cfg, phi.breakpoints);
}

}  // namespace detail

/// I_x(phi) = int phi d mu_x, by quadrature of phi against the density.
inline QuadResult integrate_functional(Dimension x, const TestFunction& phi, const QuadratureConfig& cfg = {}) {
  phi.validate();
  detail::check_endpoint_decay(phi, x.half());
  const double lc = ln_coefficient(x);
  const double a = x.half();
  if (cfg.log_substitution) {
    // d mu_x in t = log u is C(x) e^{(x/2) t} dt.
    const double t_lo = phi.support_lo > 0.0 ? std::log(phi.support_lo) : -std::numeric_limits<double>::infinity();
    const double t_hi = std::log(phi.support_hi);
    std::vector<double> cuts;
    for (double b : phi.breakpoints)
      if (b > 0.0) cuts.push_back(std::log(b));
    auto integrand = [&phi, a, lc](double t) {
      const double v = phi(std::exp(t));
      if (v == 0.0) return 0.0;
      return v * std::exp(lc + a * t);
    };
    return integrate(integrand, t_lo, t_hi, cfg, cuts);
  }
  auto integrand = [&phi, x](double u) {
    const double v = phi(u);
    return v == 0.0 ? 0.0 : v * density(x, u);
  };
  return integrate(integrand, phi.support_lo, phi.support_hi, cfg, phi.breakpoints);
}

/// M[phi](s) = int_0^inf phi(u) u^{s-1} du for real s.
inline QuadResult mellin_transform(const TestFunction& phi, double s, const QuadratureConfig& cfg = {}) {
  detail::require(std::isfinite(s), "mellin_transform: s must be finite");
  return detail::power_weighted_integral(phi, s, 0.0, cfg);
}

/// Upper bound on int_T^inf e^{-u} u^{s-1} du, the tail dropped when the
/// Gaussian probe is truncated at T. Valid for T > s - 1.
inline double exp_probe_tail_bound(double s, double cutoff) {
  detail::require(s > 0.0 && cutoff > 0.0, "tail bound needs s > 0 and cutoff > 0");
  if (s <= 1.0) return std::exp(-cutoff) * std::pow(cutoff, s - 1.0);
  detail::require(cutoff > s - 1.0, "tail bound needs cutoff > s - 1");
  return std::exp(-cutoff + (s - 1.0) * std::log(cutoff)) / (1.0 - (s - 1.0) / cutoff);
}

struct VolumeRow {
  double x, V, C, omega;
};

/// Rows at x_lo, x_lo + step, ... up to x_hi (inclusive, with a half-ulp-ish
/// allowance so that 1, 2, 3 with step 1 lands on 3).
inline std::vector<VolumeRow> volume_table(double x_lo, double x_hi, double step) {
  detail::require(x_lo > 0.0 && x_lo <= x_hi, "volume_table needs 0 < x_lo <= x_hi");
  detail::require(step > 0.0 && std::isfinite(step), "volume_table needs step > 0");
  std::vector<VolumeRow> rows;
  const double slack = 1e-9 * step;
  for (long i = 0;; ++i) {
    const double x = x_lo + static_cast<double>(i) * step;
    if (x > x_hi + slack) break;
    rows.push_back({x, ball_volume(x), coefficient(x), sphere_area(x)});
  }
  return rows;
}

/// %.17g formatting used for every numeric CSV cell.
inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// CSV with header `x,V,C,omega`, LF line endings.
inline void write_volume_csv(std::ostream& os, const std::vector<VolumeRow>& rows) {
  os << "x,V,C,omega\n";
  for (const auto& r : rows)
    os << format_g17(r.x) << ',' << format_g17(r.V) << ',' << format_g17(r.C) << ',' << format_g17(r.omega) << '\n';
}

}  // namespace cdim
