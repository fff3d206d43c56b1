#pragma once

// Gamma-function engine: a production evaluator for log Gamma on (0, inf),
// Gamma ratios done in log space, and a Gamma-free Euler-product oracle.

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>

#include "cdim/errors.hpp"

namespace cdim {

/// A strictly positive, finite real.
class PositiveReal {
 public:
  PositiveReal(double v) : value_(v) {  // NOLINT(google-explicit-constructor)
    if (!(v > 0.0) || !std::isfinite(v)) {
      std::ostringstream os;
      os << "expected a positive finite real, got " << v;
      throw DomainError(os.str());
    }
  }
  double value() const noexcept { return value_; }
  operator double() const noexcept { return value_; }  // NOLINT

 private:
  double value_;
};

/// Query for Gamma(base + shift) / Gamma(base).
struct GammaRatioQuery {
  GammaRatioQuery(PositiveReal b, double s) : base(b), shift(s) {
    if (!std::isfinite(s) || !(b.value() + s > 0.0)) {
      std::ostringstream os;
      os << "gamma ratio needs base + shift > 0, got base=" << b.value() << " shift=" << s;
      throw DomainError(os.str());
    }
  }
  PositiveReal base;
  double shift;
};

namespace testing {

// Mutation hook for the self-test: adds `perturbation * x` to every ln_gamma
// result. Zero in production.
inline std::atomic<double> gamma_perturbation{0.0};

class ScopedGammaPerturbation {
 public:
  explicit ScopedGammaPerturbation(double p) : saved_(gamma_perturbation.exchange(p)) {}
  ~ScopedGammaPerturbation() { gamma_perturbation.store(saved_); }
  ScopedGammaPerturbation(const ScopedGammaPerturbation&) = delete;
  ScopedGammaPerturbation& operator=(const ScopedGammaPerturbation&) = delete;

 private:
  double saved_;
};

}  // namespace testing

namespace detail {

inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;
inline constexpr double half_log_two_pi = 0.91893853320467274178032973640561764;

// Lanczos approximation, g = 7, nine terms.
inline constexpr double lanczos_g = 7.0;
inline constexpr std::array<double, 9> lanczos_coeffs = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

// zeta(k) - 1 for k = 2..40; coefficients of the Taylor series of
// log Gamma(2 + z) around z = 0.
inline constexpr std::array<double, 39> zeta_minus_one = {
    0.64493406684822643647,  0.2020569031595942854,   0.082323233711138191516,
    0.036927755143369926331, 0.017343061984449139715, 0.0083492773819228268398,
    0.0040773561979443393787, 0.0020083928260822144179, 0.00099457512781808533715,
    0.0004941886041194645587, 0.00024608655330804829864, 0.00012271334757848914675,
    6.1248135058704829259e-5, 3.0588236307020493552e-5, 1.5282259408651871733e-5,
    7.6371976378997622736e-6, 3.8172932649998398565e-6, 1.9082127165539389257e-6,
    9.5396203387279611315e-7, 4.7693298678780646312e-7, 2.3845050272773299e-7,
    1.1921992596531107307e-7, 5.9608189051259479612e-8, 2.9803503514652280186e-8,
    1.4901554828365041235e-8, 7.450711789835429492e-9,  3.7253340247884570548e-9,
    1.8626597235130490064e-9, 9.3132743241966818287e-10, 4.656629065033784073e-10,
    2.328311833676505492e-10, 1.1641550172700519776e-10, 5.8207720879027008892e-11,
    2.9103850444970996869e-11, 1.4551921891041984236e-11, 7.2759598350574810145e-12,
    3.6379795473786511902e-12, 1.8189896503070659476e-12, 9.0949478402638892825e-13};

// log Gamma(2 + z) for |z| <= 0.5. Relative accuracy holds through the zero
// at z = 0 because the series has no constant term.
inline double ln_gamma_near_two(double z) {
  double sum = 0.0;
  double zk = z;
  for (std::size_t i = 0; i < zeta_minus_one.size(); ++i) {
    zk *= -z;  // (-1)^(k-1) z^k with k = i + 2
    const double term = zeta_minus_one[i] * zk / static_cast<double>(i + 2);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return (1.0 - euler_gamma) * z - sum;
}

inline double ln_gamma_lanczos(double x) {
  const double z = x - 1.0;
  double acc = lanczos_coeffs[0];
  for (std::size_t i = 1; i < lanczos_coeffs.size(); ++i) acc += lanczos_coeffs[i] / (z + static_cast<double>(i));
  const double t = z + lanczos_g + 0.5;
  return half_log_two_pi + (z + 0.5) * std::log(t) - t + std::log(acc);
}

inline double ln_gamma_unperturbed(double x) {
  if (x >= 2.5) return ln_gamma_lanczos(x);
  if (x >= 1.5) return ln_gamma_near_two(x - 2.0);
  if (x >= 0.5) return ln_gamma_near_two(x - 1.0) - std::log1p(x - 1.0);
  // x in (0, 0.5): one step of the recurrence lands in [1, 1.5).
  return ln_gamma_unperturbed(x + 1.0) - std::log(x);
}

inline void check_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    std::ostringstream os;
    os << what << ": argument must be positive and finite, got " << x;
    throw DomainError(os.str());
  }
}

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace detail

/// log Gamma(x) for x > 0.
inline double ln_gamma(double x) {
  detail::check_positive(x, "ln_gamma");
  const double p = testing::gamma_perturbation.load(std::memory_order_relaxed);
  return detail::ln_gamma_unperturbed(x) + p * x;
}

/// Gamma(x) for x > 0. Throws RangeError (carrying ln_gamma(x)) on overflow.
inline double gamma(double x) {
  const double lg = ln_gamma(x);
  if (lg > std::log(std::numeric_limits<double>::max())) {
    std::ostringstream os;
    os << "gamma(" << x << ") overflows double; ln_gamma = " << lg;
    throw RangeError(os.str(), lg);
  }
  return std::exp(lg);
}

/// log of Gamma(base + shift) / Gamma(base).
inline double ln_gamma_ratio(const GammaRatioQuery& q) {
  const double b = q.base.value();
  return ln_gamma(b + q.shift) - ln_gamma(b);
}

/// Gamma(base + shift) / Gamma(base). Small integer shifts use the exact
/// recurrence product.
inline double gamma_ratio(const GammaRatioQuery& q) {
  const double b = q.base.value();
  const double s = q.shift;
  constexpr double max_exact_shift = 16.0;
  if (s == std::nearbyint(s) && std::abs(s) <= max_exact_shift &&
      testing::gamma_perturbation.load(std::memory_order_relaxed) == 0.0) {
    const int m = static_cast<int>(s);
    double prod = 1.0;
    if (m >= 0) {
      for (int k = 0; k < m; ++k) prod *= b + k;
      return prod;
    }
    for (int k = 1; k <= -m; ++k) prod *= b - k;
    return 1.0 / prod;
  }
  const double lr = ln_gamma_ratio(q);
  if (lr > std::log(std::numeric_limits<double>::max()))
    throw RangeError("gamma_ratio overflows double", lr);
  return std::exp(lr);
}

/// n^r * prod_{k=0}^{n} (a+k)/(a+r+k), summed in log space. Converges to
/// Gamma(a+r)/Gamma(a) with error O(1/n). Never touches ln_gamma.
inline double euler_limit_ratio(double a, double r, std::int64_t n) {
  detail::check_positive(a, "euler_limit_ratio");
  detail::require(r >= 0.0 && std::isfinite(r), "euler_limit_ratio: r must be >= 0");
  detail::require(n >= 1, "euler_limit_ratio: n must be >= 1");
  if (r == 0.0) return 1.0;
  detail::CompensatedSum log_prod;
  for (std::int64_t k = 0; k <= n; ++k) log_prod.add(-std::log1p(r / (a + static_cast<double>(k))));
  log_prod.add(r * std::log(static_cast<double>(n)));
  return std::exp(log_prod.value());
}

/// One Richardson step on euler_limit_ratio: error O(1/n^2).
inline double euler_limit_extrapolated(double a, double r, std::int64_t n) {
  detail::require(n >= 2, "euler_limit_extrapolated: n must be >= 2");
  return 2.0 * euler_limit_ratio(a, r, 2 * n) - euler_limit_ratio(a, r, n);
}

}  // namespace cdim
