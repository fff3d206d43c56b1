#pragma once

// Recurrence-plus-log-convexity route to the ball-volume transport T(x, r).
//
// With a = x/2 + 1 and G_x(r) = pi^r / T(x, r), the conditions
//   G_x(0) = 1,  G_x(r + 1) = (a + r) G_x(r),  log G_x convex
// determine G_x(r) = Gamma(a + r) / Gamma(a). This header evaluates that
// solution from the recurrence and an Euler product only. It must not include
// gamma.hpp or anything that does: agreement with the closed form is only a
// cross-check if the two routes share no code.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

#include "cdim/errors.hpp"

namespace cdim::bm {

inline constexpr std::int64_t default_terms = 10000;

/// x > 0 together with the recurrence base a = x/2 + 1.
class BmProblem {
 public:
  explicit BmProblem(double x) : x_(x) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      std::ostringstream os;
      os << "Bohr-Mollerup route needs x > 0, got " << x;
      throw DomainError(os.str());
    }
  }
  double x() const noexcept { return x_; }
  double a() const noexcept { return 0.5 * x_ + 1.0; }

 private:
  double x_;
};

/// Samples of a positive function on a strictly increasing grid.
class GridFunction {
 public:
  GridFunction(std::vector<double> grid, std::vector<double> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    cdim::detail::require(grid_.size() == values_.size(), "grid and values must have equal length");
    for (std::size_t i = 1; i < grid_.size(); ++i)
      cdim::detail::require(grid_[i] > grid_[i - 1], "grid must be strictly increasing");
    for (double v : values_) cdim::detail::require(v > 0.0 && std::isfinite(v), "grid function values must be positive");
  }
  const std::vector<double>& grid() const noexcept { return grid_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return grid_.size(); }

 private:
  std::vector<double> grid_;
  std::vector<double> values_;
};

namespace detail {

// log of n^f prod_{k=0}^{n} (b+k)/(b+f+k), Neumaier-summed.
inline double log_euler_product(double b, double f, std::int64_t n) {
  double sum = 0.0, comp = 0.0;
  auto add = [&](double v) {
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  };
  for (std::int64_t k = 0; k <= n; ++k) add(-std::log1p(f / (b + static_cast<double>(k))));
  add(f * std::log(static_cast<double>(n)));
  return sum + comp;
}

// Richardson-extrapolated Euler limit of Gamma(b + f) / Gamma(b).
inline double euler_ratio_extrapolated(double b, double f, std::int64_t n) {
  if (f == 0.0) return 1.0;
  return 2.0 * std::exp(log_euler_product(b, f, 2 * n)) - std::exp(log_euler_product(b, f, n));
}

}  // namespace detail

/// log G_x(r): the integer part of r through the recurrence, the fractional
/// part through the extrapolated Euler product with n terms.
inline double log_G(const BmProblem& p, double r, std::int64_t n = default_terms) {
  cdim::detail::require(r >= 0.0 && std::isfinite(r), "Bohr-Mollerup route needs r >= 0");
  cdim::detail::require(n >= 2, "Bohr-Mollerup route needs n >= 2");
  const double whole = std::floor(r);
  const double frac = r - whole;
  double log_g = 0.0;
  double b = p.a();
  for (double k = 0.0; k < whole; k += 1.0) {
    log_g += std::log(b);
    b += 1.0;
  }
  if (frac > 0.0) log_g += std::log(detail::euler_ratio_extrapolated(b, frac, n));
  return log_g;
}

/// T(x, r) = pi^r / G_x(r) computed without any Gamma evaluation.
inline double bm_transport(double x, double r, std::int64_t n = default_terms) {
  const BmProblem p(x);
  return std::exp(r * std::log(std::numbers::pi) - log_G(p, r, n));
}

/// |G(r+1) - (a+r) G(r)| / G(r+1) with G = pi^r / bm_transport.
inline double bm_recurrence_residual(double x, double r, std::int64_t n = default_terms) {
  const BmProblem p(x);
  const double g0 = std::exp(log_G(p, r, n));
  const double g1 = std::exp(log_G(p, r + 1.0, n));
  return std::abs(g1 - (p.a() + r) * g0) / g1;
}

struct ConvexityResult {
  double min_second_difference;  // scaled by step^2, i.e. a second derivative
  double location;               // grid point where the minimum occurs
  bool convex(double tolerance = -1e-10) const { return min_second_difference >= tolerance; }
};

/// Minimum second divided difference of log G over interior grid points.
inline ConvexityResult log_convexity_check(const GridFunction& g) {
  if (g.size() < 3) throw DegenerateInputError("log-convexity check needs at least three grid points");
  const auto& t = g.grid();
  const auto& v = g.values();
  ConvexityResult out{std::numeric_limits<double>::infinity(), t[1]};
  for (std::size_t i = 1; i + 1 < g.size(); ++i) {
    const double hl = t[i] - t[i - 1];
    const double hr = t[i + 1] - t[i];
    const double yl = std::log(v[i - 1]), y = std::log(v[i]), yr = std::log(v[i + 1]);
    const double d2 = 2.0 * ((yr - y) / hr - (y - yl) / hl) / (hl + hr);
    if (d2 < out.min_second_difference) out = {d2, t[i]};
  }
  return out;
}

/// Uniform grid lo, lo + step, ..., hi.
inline std::vector<double> uniform_grid(double lo, double hi, double step) {
  cdim::detail::require(step > 0.0 && lo <= hi, "uniform grid needs step > 0 and lo <= hi");
  std::vector<double> g;
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long i = 0; i <= count; ++i) g.push_back(lo + static_cast<double>(i) * step);
  return g;
}

/// G_x sampled from the Gamma-free route on a grid of r >= 0.
inline GridFunction sample_G(double x, const std::vector<double>& r_grid, std::int64_t n = default_terms) {
  const BmProblem p(x);
  std::vector<double> vals;
  vals.reserve(r_grid.size());
  for (double r : r_grid) vals.push_back(std::exp(log_G(p, r, n)));
  return GridFunction(r_grid, vals);
}

}  // namespace cdim::bm
