#pragma once

#include <stdexcept>
#include <string>

namespace cdim {

/// Base of every error thrown by the library. `kind()` is the stable tag used
/// in machine-readable error reports.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept = 0;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "domain"; }
};

/// Result not representable in double precision. Carries the log of the
/// magnitude so callers can continue in log space.
class RangeError : public Error {
 public:
  RangeError(const std::string& what, double log_value)
      : Error(what), log_value_(log_value) {}
  const char* kind() const noexcept override { return "range"; }
  double log_value() const noexcept { return log_value_; }

 private:
  double log_value_;
};

/// Adaptive quadrature did not meet its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_estimate, double error_bound)
      : Error(what), best_estimate_(best_estimate), error_bound_(error_bound) {}
  const char* kind() const noexcept override { return "convergence"; }
  double best_estimate() const noexcept { return best_estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double best_estimate_;
  double error_bound_;
};

/// An integral that cannot be made finite (non-decaying integrand on an
/// infinite range, non-integrable singularity).
class DivergenceError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "divergence"; }
};

/// Input that is well-typed but unusable (empty grid, all-zero profile).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "degenerate_input"; }
};

/// A black-box functional whose response to dilations is not a power law.
class NotScalingCovariantError : public Error {
 public:
  NotScalingCovariantError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  const char* kind() const noexcept override { return "not_scaling_covariant"; }
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Truncated-box integral whose tail bound exceeds the requested tolerance.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, double tail_bound, double suggested_radius)
      : Error(what), tail_bound_(tail_bound), suggested_radius_(suggested_radius) {}
  const char* kind() const noexcept override { return "truncation"; }
  double tail_bound() const noexcept { return tail_bound_; }
  double suggested_radius() const noexcept { return suggested_radius_; }

 private:
  double tail_bound_;
  double suggested_radius_;
};

namespace detail {

inline void require(bool cond, const std::string& what) {
  if (!cond) throw DomainError(what);
}

}  // namespace detail

}  // namespace cdim
