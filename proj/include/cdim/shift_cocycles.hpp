#pragma once

// Dimension-shift transports for x -> x + 2r:
//
//   R(x, r)   = C(x+2r) / C(x) = pi^r Gamma(x/2) / Gamma(x/2 + r)
//   T(x, r)   = V(x+2r) / V(x) = pi^r Gamma(x/2 + 1) / Gamma(x/2 + r + 1)
//   T_a(x, r) = a^r T(x, r)
//
// Each satisfies F(x, r + s) = F(x + 2r, s) F(x, r); R / T is the coboundary
// of beta(x) = x.

#include <cmath>
#include <sstream>
#include <string>

#include "cdim/errors.hpp"
#include "cdim/gamma.hpp"
#include "cdim/radial_measure.hpp"

namespace cdim {

/// (x, r) with x > 0 and x + 2r > 0.
class ShiftPair {
 public:
  ShiftPair(double x, double r) : x_(x), r_(r) {
    if (!(x > 0.0) || !std::isfinite(x) || !std::isfinite(r) || !(x + 2.0 * r > 0.0)) {
      std::ostringstream os;
      os << "inadmissible shift pair (x=" << x << ", r=" << r << "): need x > 0 and x + 2r > 0";
      throw DomainError(os.str());
    }
  }
  double x() const noexcept { return x_; }
  double r() const noexcept { return r_; }
  double target() const noexcept { return x_ + 2.0 * r_; }

 private:
  double x_;
  double r_;
};

struct CocycleKind {
  enum class Kind { R, T, Ta };
  Kind kind = Kind::T;
  double a = 1.0;  // sublevel radius, used by Ta only

  static CocycleKind radial() { return {Kind::R, 1.0}; }
  static CocycleKind ball() { return {Kind::T, 1.0}; }
  static CocycleKind sublevel(double a) {
    detail::require(a > 0.0 && std::isfinite(a), "T_a needs a > 0");
    return {Kind::Ta, a};
  }

  std::string name() const {
    switch (kind) {
      case Kind::R: return "R";
      case Kind::T: return "T";
      case Kind::Ta: return "Ta";
    }
    return "?";
  }
};

namespace detail {

// log of Gamma(b + r) / Gamma(b), exact product for small integer r.
inline double log_rising(double b, double r) {
  const GammaRatioQuery q(b, r);
  if (r == std::nearbyint(r) && std::abs(r) <= 16.0) return std::log(gamma_ratio(q));
  return ln_gamma_ratio(q);
}

}  // namespace detail

inline double log_transport_R(const ShiftPair& p) {
  return p.r() * log_pi - detail::log_rising(0.5 * p.x(), p.r());
}

inline double log_transport_T(const ShiftPair& p) {
  return p.r() * log_pi - detail::log_rising(0.5 * p.x() + 1.0, p.r());
}

inline double transport_R(const ShiftPair& p) { return std::exp(log_transport_R(p)); }

inline double transport_T(const ShiftPair& p) { return std::exp(log_transport_T(p)); }

inline double transport_Ta(double a, const ShiftPair& p) {
  detail::require(a > 0.0 && std::isfinite(a), "transport_Ta needs a > 0");
  return std::exp(p.r() * std::log(a) + log_transport_T(p));
}

inline double transport(const CocycleKind& kind, const ShiftPair& p) {
  switch (kind.kind) {
    case CocycleKind::Kind::R: return transport_R(p);
    case CocycleKind::Kind::T: return transport_T(p);
    case CocycleKind::Kind::Ta: return transport_Ta(kind.a, p);
  }
  return 0.0;
}

/// |F(x, r+s) - F(x+2r, s) F(x, r)| / F(x, r+s).
inline double cocycle_residual(const CocycleKind& kind, Dimension x, double r, double s) {
  auto make = [](const char* which, double px, double pr) {
    try {
      return ShiftPair(px, pr);
    } catch (const DomainError& e) {
      throw DomainError(std::string(which) + ": " + e.what());
    }
  };
  const ShiftPair total = make("pair (x, r+s)", x.value(), r + s);
  const ShiftPair first = make("pair (x, r)", x.value(), r);
  const ShiftPair second = make("pair (x+2r, s)", first.target(), s);
  const double whole = transport(kind, total);
  const double chained = transport(kind, second) * transport(kind, first);
  return std::abs(whole - chained) / whole;
}

/// beta(x + 2r) / beta(x) with beta(x) = x.
inline double coboundary_ratio(const ShiftPair& p) { return p.target() / p.x(); }

/// a^r = beta_a(x + 2r) / beta_a(x) with beta_a(x) = a^{x/2}.
inline double character_coboundary(double a, const ShiftPair& p) {
  detail::require(a > 0.0, "character coboundary needs a > 0");
  return std::exp(0.5 * p.target() * std::log(a) - 0.5 * p.x() * std::log(a));
}

/// |V(x+2) - 2 pi / (x+2) V(x)| / V(x+2).
inline double recurrence_check(Dimension x) {
  const double lhs = ball_volume(x.value() + 2.0);
  const double rhs = 2.0 * std::numbers::pi / (x.value() + 2.0) * ball_volume(x);
  return std::abs(lhs - rhs) / lhs;
}

}  // namespace cdim
