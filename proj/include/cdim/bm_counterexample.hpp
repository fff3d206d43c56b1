#pragma once

// Interpolants of the integer ball volumes that are not the Gamma continuation:
//
//   V_eps(z) = V(z) + eps sin(pi z)
//
// agrees with V at every positive integer but its transport reciprocal is not
// log-convex, so the Bohr-Mollerup conditions reject it.

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "cdim/bm_route.hpp"
#include "cdim/radial_measure.hpp"

namespace cdim::bm {

namespace detail {

// sin(pi z), exactly zero at integers.
inline double sin_pi(double z) {
  const double n = std::nearbyint(z);
  const double s = std::sin(std::numbers::pi * (z - n));
  return std::fmod(n, 2.0) == 0.0 ? s : -s;
}

}  // namespace detail

inline double interpolation_counterexample(double z, double eps) {
  cdim::detail::require(z > 0.0 && std::isfinite(z), "interpolation_counterexample needs z > 0");
  return ball_volume(z) + eps * detail::sin_pi(z);
}

/// G(r) = pi^r V_eps(x) / V_eps(x + 2r), the reciprocal transport of the
/// perturbed interpolant.
inline GridFunction counterexample_G(double x, double eps, const std::vector<double>& r_grid) {
  const double base = interpolation_counterexample(x, eps);
  std::vector<double> vals;
  vals.reserve(r_grid.size());
  for (double r : r_grid) {
    const double shifted = interpolation_counterexample(x + 2.0 * r, eps);
    if (!(shifted > 0.0) || !(base > 0.0)) {
      std::ostringstream os;
      os << "perturbed volume is not positive at z = " << x + 2.0 * r << " (eps = " << eps << ")";
      throw DomainError(os.str());
    }
    vals.push_back(std::pow(std::numbers::pi, r) * base / shifted);
  }
  return GridFunction(r_grid, vals);
}

}  // namespace cdim::bm
