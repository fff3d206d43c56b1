#pragma once

// Anisotropic polar coordinates. A dilation generator E (eigenvalues with
// positive real part) acts by r^E = exp(E log r); a gauge P is E-homogeneous
// of degree one, P(r^E xi) = r P(xi), with homogeneous order mu_P = tr E.
// The polar formula gives
//
//   int Phi(P(xi)) d xi = sigma_P(S_P) int_0^inf Phi(r) r^{mu_P - 1} dr,
//
// hence m(B_P) = int e^{-P} / Gamma(mu_P + 1). This header estimates both
// sides by Monte Carlo and compares them.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "cdim/errors.hpp"
#include "cdim/gamma.hpp"
#include "cdim/philox.hpp"
#include "cdim/quadrature.hpp"
#include "cdim/radial_measure.hpp"

namespace cdim {

inline constexpr std::size_t default_max_dimension = 10;

/// d x d generator E with spectrum in the open right half plane.
class DilationGenerator {
 public:
  explicit DilationGenerator(Eigen::MatrixXd e, std::size_t max_dim = default_max_dimension)
      : e_(std::move(e)) {
    detail::require(e_.rows() == e_.cols() && e_.rows() >= 1, "dilation generator must be square and non-empty");
    detail::require(static_cast<std::size_t>(e_.rows()) <= max_dim,
                    "dimension exceeds the configured maximum for box Monte Carlo");
    detail::require(e_.allFinite(), "dilation generator has non-finite entries");
    const Eigen::Index d = e_.rows();
    diagonal_ = e_.isDiagonal(0.0);
    const bool upper = e_.isUpperTriangular(0.0);
    const bool lower = e_.isLowerTriangular(0.0);
    symmetric_ = e_.isApprox(e_.transpose(), 0.0);
    Eigen::VectorXd re(d);
    if (upper || lower) {
      re = e_.diagonal();
    } else {
      Eigen::EigenSolver<Eigen::MatrixXd> solver(e_, false);
      re = solver.eigenvalues().real();
    }
    constexpr double positivity_tol = 1e-12;
    for (Eigen::Index i = 0; i < d; ++i) {
      if (!(re(i) > positivity_tol)) {
        std::ostringstream os;
        os << "dilation generator has an eigenvalue with real part " << re(i) << " <= " << positivity_tol;
        throw DomainError(os.str());
      }
    }
    max_real_eigenvalue_ = re.maxCoeff();
    detail::require(e_.trace() > 0.0, "dilation generator must have positive trace");
  }

  static DilationGenerator identity(std::size_t d, std::size_t max_dim = default_max_dimension) {
    return DilationGenerator(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)),
                             max_dim);
  }
  static DilationGenerator diagonal(const std::vector<double>& entries,
                                    std::size_t max_dim = default_max_dimension) {
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(entries.data(), static_cast<Eigen::Index>(entries.size()));
    return DilationGenerator(v.asDiagonal().toDenseMatrix(), max_dim);
  }

  std::size_t dim() const noexcept { return static_cast<std::size_t>(e_.rows()); }
  const Eigen::MatrixXd& matrix() const noexcept { return e_; }
  bool is_diagonal() const noexcept { return diagonal_; }
  bool is_symmetric() const noexcept { return symmetric_; }
  double max_real_eigenvalue() const noexcept { return max_real_eigenvalue_; }

 private:
  Eigen::MatrixXd e_;
  bool diagonal_ = false;
  bool symmetric_ = false;
  double max_real_eigenvalue_ = 0.0;
};

/// mu_P = tr E, the homogeneous order of Lebesgue measure.
inline double trace_order(const DilationGenerator& g) { return g.matrix().trace(); }

/// exp(A) by scaling and squaring with a diagonal [6/6] Pade approximant.
inline Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& a) {
  detail::require(a.rows() == a.cols(), "matrix_exponential needs a square matrix");
  const Eigen::Index n = a.rows();
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Eigen::MatrixXd scaled = a / std::ldexp(1.0, squarings);
  constexpr int order = 6;
  Eigen::MatrixXd num = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd den = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
  double c = 1.0;
  for (int k = 1; k <= order; ++k) {
    c *= static_cast<double>(order - k + 1) / static_cast<double>(k * (2 * order - k + 1));
    power = power * scaled;
    num += c * power;
    den += (k % 2 == 0 ? c : -c) * power;
  }
  Eigen::MatrixXd result = den.partialPivLu().solve(num);
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

/// r^E = exp(E log r).
inline Eigen::MatrixXd dilation_matrix(const DilationGenerator& g, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    std::ostringstream os;
    os << "dilation needs r > 0, got " << r;
    throw DomainError(os.str());
  }
  const double lr = std::log(r);
  const Eigen::MatrixXd& e = g.matrix();
  if (g.is_diagonal()) return (e.diagonal() * lr).array().exp().matrix().asDiagonal();
  if (g.is_symmetric()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(e);
    const Eigen::VectorXd scale = (solver.eigenvalues() * lr).array().exp();
    return solver.eigenvectors() * scale.asDiagonal() * solver.eigenvectors().transpose();
  }
  return matrix_exponential(e * lr);
}

/// r^E xi.
inline Eigen::VectorXd dilate(const DilationGenerator& g, double r, const Eigen::VectorXd& xi) {
  detail::require(static_cast<std::size_t>(xi.size()) == g.dim(), "dilate: vector dimension mismatch");
  if (!(r > 0.0) || !std::isfinite(r)) {
    std::ostringstream os;
    os << "dilation needs r > 0, got " << r;
    throw DomainError(os.str());
  }
  if (g.is_diagonal()) {
    Eigen::VectorXd out(xi.size());
    for (Eigen::Index i = 0; i < xi.size(); ++i) out(i) = std::pow(r, g.matrix()(i, i)) * xi(i);
    return out;
  }
  return dilation_matrix(g, r) * xi;
}

using GaugeFunction = std::function<double(std::span<const double>)>;

enum class GaugeFamily { custom, euclidean, diagonal_power };

/// An E-homogeneous gauge of degree one. Evaluators must be safe for
/// concurrent calls.
struct HomogeneousGauge {
  GaugeFunction evaluator;
  DilationGenerator generator;
  std::string label;
  GaugeFamily family = GaugeFamily::custom;
  // Exponents b_i when P = sum |xi_i|^{b_i}; enables factorized closed forms.
  std::optional<std::vector<double>> diagonal_powers;

  double operator()(std::span<const double> xi) const { return evaluator(xi); }
  std::size_t dim() const noexcept { return generator.dim(); }
  double mu() const { return trace_order(generator); }
};

/// Largest relative homogeneity defect |P(r^E xi) - r P(xi)| / (r P(xi)) over
/// `samples` random pairs, r log-uniform in [0.01, 100], xi uniform in the box.
inline double homogeneity_defect(const HomogeneousGauge& p, int samples, std::uint64_t seed,
                                 double box_halfwidth = 1.0) {
  PhiloxStream rng(seed, 0xC0FFEEu);
  const std::size_t d = p.dim();
  double worst = 0.0;
  Eigen::VectorXd xi(static_cast<Eigen::Index>(d));
  for (int k = 0; k < samples; ++k) {
    const double r = std::exp(rng.uniform(std::log(0.01), std::log(100.0)));
    for (std::size_t i = 0; i < d; ++i) xi(static_cast<Eigen::Index>(i)) = rng.uniform(-box_halfwidth, box_halfwidth);
    const double base = p(std::span<const double>(xi.data(), d));
    if (base == 0.0) continue;
    const Eigen::VectorXd moved = dilate(p.generator, r, xi);
    const double lhs = p(std::span<const double>(moved.data(), d));
    worst = std::max(worst, std::abs(lhs - r * base) / (r * base));
  }
  return worst;
}

/// Builds a gauge after spot-checking homogeneity on 100 random pairs.
inline HomogeneousGauge make_gauge(GaugeFunction f, DilationGenerator g, std::string label,
                                   GaugeFamily family = GaugeFamily::custom,
                                   std::optional<std::vector<double>> diagonal_powers = std::nullopt) {
  detail::require(static_cast<bool>(f), "gauge needs an evaluator");
  HomogeneousGauge p{std::move(f), std::move(g), std::move(label), family, std::move(diagonal_powers)};
  const double defect = homogeneity_defect(p, 100, 0x5EEDu);
  if (!(defect <= 1e-9)) {
    std::ostringstream os;
    os << "gauge '" << p.label << "' is not E-homogeneous of degree 1 (relative defect " << defect << ")";
    throw DomainError(os.str());
  }
  return p;
}

/// P = |xi| with E = I, mu_P = d.
inline HomogeneousGauge gauge_euclidean(std::size_t d, std::size_t max_dim = default_max_dimension) {
  detail::require(d >= 1, "euclidean gauge needs d >= 1");
  std::optional<std::vector<double>> powers;
  if (d == 1) powers = std::vector<double>{1.0};
  return make_gauge(
      [](std::span<const double> xi) {
        double s = 0.0;
        for (double v : xi) s += v * v;
        return std::sqrt(s);
      },
      DilationGenerator::identity(d, max_dim), "euclidean:" + std::to_string(d), GaugeFamily::euclidean, powers);
}

/// P = sum |xi_i|^{b_i} with E = diag(1/b_i), mu_P = sum 1/b_i.
inline HomogeneousGauge gauge_diagonal_power(const std::vector<double>& b) {
  detail::require(!b.empty(), "diagonal power gauge needs at least one exponent");
  std::vector<double> inv;
  std::ostringstream label;
  label << "diagpow:";
  for (std::size_t i = 0; i < b.size(); ++i) {
    detail::require(b[i] >= 1.0 && std::isfinite(b[i]), "diagonal power exponents must be >= 1");
    inv.push_back(1.0 / b[i]);
    label << (i ? "," : "") << b[i];
  }
  return make_gauge(
      [b](std::span<const double> xi) {
        double s = 0.0;
        for (std::size_t i = 0; i < xi.size(); ++i) s += std::pow(std::abs(xi[i]), b[i]);
        return s;
      },
      DilationGenerator::diagonal(inv), label.str(), GaugeFamily::diagonal_power, b);
}

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
  double tail_bound = 0.0;  // additive bound on truncated mass, if any
  std::vector<std::string> diagnostics;
};

struct McOptions {
  // Sample partitions; each is an independent Philox stream and the results
  // are reduced in partition order. Changing this changes the estimate.
  std::uint32_t partitions = 64;
  unsigned threads = 0;  // 0: hardware concurrency
};

namespace detail {

struct PartitionSums {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::int64_t hits = 0;
  std::int64_t boundary_hits = 0;
};

// Runs body(partition, count, out) for each partition, possibly in parallel.
template <class Body>
std::vector<PartitionSums> run_partitions(std::int64_t n, const McOptions& opts, const Body& body) {
  require(n >= 1, "Monte Carlo needs at least one sample");
  require(opts.partitions >= 1, "Monte Carlo needs at least one partition");
  const std::uint32_t parts = opts.partitions;
  std::vector<PartitionSums> out(parts);
  auto count_for = [n, parts](std::uint32_t k) {
    const std::int64_t base = n / parts, extra = n % parts;
    return base + (static_cast<std::int64_t>(k) < extra ? 1 : 0);
  };
  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, parts);
  if (threads <= 1) {
    for (std::uint32_t k = 0; k < parts; ++k) body(k, count_for(k), out[k]);
    return out;
  }
  std::atomic<std::uint32_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::uint32_t k = next++; k < parts; k = next++) body(k, count_for(k), out[k]);
    });
  }
  for (auto& th : pool) th.join();
  return out;
}

inline double box_volume(const std::vector<double>& halfwidths) {
  double v = 1.0;
  for (double h : halfwidths) v *= 2.0 * h;
  return v;
}

inline constexpr std::uint32_t exponential_stream_offset = 1u << 20;
inline constexpr std::uint32_t reduction_stream_offset = 1u << 21;

}  // namespace detail

/// Estimated min of P on the surface of the unit cube {max |xi_i| = 1}, by
/// a coarse grid on each face.
inline double gauge_cube_minimum(const HomogeneousGauge& p) {
  const std::size_t d = p.dim();
  std::vector<double> xi(d);
  if (d == 1) {
    xi[0] = 1.0;
    double m = p(xi);
    xi[0] = -1.0;
    return std::min(m, p(xi));
  }
  const auto per_axis = static_cast<std::size_t>(
      std::max(3.0, std::floor(std::pow(20000.0, 1.0 / static_cast<double>(d - 1)))));
  const std::size_t m = per_axis % 2 == 0 ? per_axis + 1 : per_axis;  // odd: include face centres
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> idx(d - 1);
  for (std::size_t face = 0; face < 2 * d; ++face) {
    const std::size_t axis = face / 2;
    std::fill(idx.begin(), idx.end(), 0);
    while (true) {
      for (std::size_t i = 0, j = 0; i < d; ++i) {
        if (i == axis) {
          xi[i] = face % 2 ? -1.0 : 1.0;
        } else {
          xi[i] = -1.0 + 2.0 * static_cast<double>(idx[j++]) / static_cast<double>(m - 1);
        }
      }
      best = std::min(best, p(xi));
      std::size_t k = 0;
      while (k < idx.size() && ++idx[k] == m) idx[k++] = 0;
      if (k == idx.size()) break;
    }
  }
  return best;
}

/// Box containing B_P with a 10% margin, from P >= c max|xi_i|^{1/e_max}
/// outside the unit cube. Diagonal generators only.
inline std::vector<double> default_volume_box(const HomogeneousGauge& p) {
  detail::require(p.generator.is_diagonal(), "default box needs a diagonal generator; pass the box explicitly");
  const double c = gauge_cube_minimum(p);
  detail::require(c > 0.0, "gauge vanishes on the unit cube surface");
  const double kappa = 1.0 / p.generator.max_real_eigenvalue();
  const double h = 1.1 * std::max(1.0, std::pow(1.0 / c, 1.0 / kappa));
  return std::vector<double>(p.dim(), h);
}

/// m(B_P) = |box| * P(P(xi) < 1) by uniform sampling in the box.
inline McEstimate mc_ball_volume(const HomogeneousGauge& p, const std::vector<double>& box_halfwidths, std::int64_t n,
                                 std::uint64_t seed, const McOptions& opts = {}) {
  const std::size_t d = p.dim();
  detail::require(box_halfwidths.size() == d, "box dimension must match the gauge");
  for (double h : box_halfwidths) detail::require(h > 0.0 && std::isfinite(h), "box halfwidths must be positive");
  constexpr double shell = 1e-3;
  auto parts = detail::run_partitions(n, opts, [&](std::uint32_t k, std::int64_t count, detail::PartitionSums& out) {
    PhiloxStream rng(seed, k);
    std::vector<double> xi(d);
    for (std::int64_t s = 0; s < count; ++s) {
      bool near_face = false;
      for (std::size_t i = 0; i < d; ++i) {
        xi[i] = rng.uniform(-box_halfwidths[i], box_halfwidths[i]);
        near_face = near_face || std::abs(xi[i]) > (1.0 - shell) * box_halfwidths[i];
      }
      if (p(xi) < 1.0) {
        ++out.hits;
        if (near_face) ++out.boundary_hits;
      }
    }
  });
  std::int64_t hits = 0, boundary = 0;
  for (const auto& s : parts) {
    hits += s.hits;
    boundary += s.boundary_hits;
  }
  McEstimate est;
  const double vol = detail::box_volume(box_halfwidths);
  const double frac = static_cast<double>(hits) / static_cast<double>(n);
  est.mean = vol * frac;
  est.std_error = vol * std::sqrt(frac * (1.0 - frac) / static_cast<double>(n));
  est.n_samples = n;
  est.seed = seed;
  // Face centres inside B_P mean the box cuts the body.
  std::vector<double> probe(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (double sgn : {1.0, -1.0}) {
      probe[i] = sgn * box_halfwidths[i];
      if (p(probe) < 1.0) {
        est.diagnostics.push_back("box too small: face centre on axis " + std::to_string(i) + " lies inside B_P");
      }
    }
    probe[i] = 0.0;
  }
  if (boundary > 0) {
    est.diagnostics.push_back("box too small: " + std::to_string(boundary) +
                              " hits within the outer 0.1% shell of the box");
  }
  return est;
}

/// Additive bound on int_{max|xi_i| > R} e^{-P}, using P >= c rho^kappa with
/// rho = max|xi_i|, kappa = 1/e_max and c the cube minimum of P. Returns
/// NaN for non-diagonal generators (no bound available).
inline double gauge_exponential_tail_bound(const HomogeneousGauge& p, double radius) {
  if (!p.generator.is_diagonal()) return std::numeric_limits<double>::quiet_NaN();
  detail::require(radius >= 1.0, "tail bound needs truncation radius >= 1");
  const double d = static_cast<double>(p.dim());
  const double c = gauge_cube_minimum(p);
  const double kappa = 1.0 / p.generator.max_real_eigenvalue();
  // int_R^inf e^{-c s^kappa} d 2^d s^{d-1} ds = d 2^d / (kappa c^{d/kappa}) Gamma(d/kappa, c R^kappa)
  const double s = d / kappa;
  const double z = c * std::pow(radius, kappa);
  double upper;
  if (s <= 1.0) {
    upper = std::exp(-z + (s - 1.0) * std::log(z));
  } else if (z > 2.0 * (s - 1.0)) {
    upper = std::exp(-z + (s - 1.0) * std::log(z)) / (1.0 - (s - 1.0) / z);
  } else {
    return std::numeric_limits<double>::infinity();
  }
  return d * std::pow(2.0, d) / (kappa * std::pow(c, s)) * upper;
}

/// Smallest radius (doubling from 4) whose tail bound is below `tolerance`.
inline double suggest_truncation_radius(const HomogeneousGauge& p, double tolerance) {
  detail::require(tolerance > 0.0, "tolerance must be positive");
  detail::require(p.generator.is_diagonal(), "truncation radius suggestion needs a diagonal generator");
  double lo = 1.0, hi = 4.0;
  while (!(gauge_exponential_tail_bound(p, hi) <= tolerance)) {
    lo = hi;
    hi *= 2.0;
    detail::require(hi < 1e8, "no truncation radius meets the tolerance");
  }
  for (int i = 0; i < 40; ++i) {
    const double mid = 0.5 * (lo + hi);
    (gauge_exponential_tail_bound(p, mid) <= tolerance ? hi : lo) = mid;
  }
  return hi;
}

struct ExponentialOptions {
  McOptions mc{};
  // Use prod 2 Gamma(1 + 1/b_i) for diagonal power gauges.
  bool use_closed_form = true;
  // Fail when the truncation tail bound exceeds this (0 disables).
  double tail_tolerance = 0.0;
};

/// prod_i 2 Gamma(1 + 1/b_i) = int e^{-sum |xi_i|^{b_i}}.
inline double diagonal_power_exponential_integral(const std::vector<double>& b) {
  double log_val = 0.0;
  for (double bi : b) log_val += std::log(2.0) + ln_gamma(1.0 + 1.0 / bi);
  return std::exp(log_val);
}

/// int e^{-P}: closed form for diagonal power gauges, otherwise uniform MC
/// over [-R, R]^d plus a reported tail bound.
inline McEstimate mc_gauge_exponential(const HomogeneousGauge& p, double truncation_radius, std::int64_t n,
                                       std::uint64_t seed, const ExponentialOptions& opts = {}) {
  McEstimate est;
  est.seed = seed;
  if (opts.use_closed_form && p.diagonal_powers) {
    est.mean = diagonal_power_exponential_integral(*p.diagonal_powers);
    est.n_samples = 0;
    est.diagnostics.push_back("closed form: product of one-dimensional integrals");
    return est;
  }
  detail::require(truncation_radius > 0.0 && std::isfinite(truncation_radius), "truncation radius must be positive");
  const std::size_t d = p.dim();
  est.tail_bound = gauge_exponential_tail_bound(p, std::max(1.0, truncation_radius));
  if (std::isnan(est.tail_bound)) {
    est.diagnostics.push_back("no tail bound for a non-diagonal generator; truncation mass unreported");
  } else {
    std::ostringstream os;
    os << "tail bound " << est.tail_bound << " from cube minimum c = " << gauge_cube_minimum(p);
    est.diagnostics.push_back(os.str());
  }
  if (opts.tail_tolerance > 0.0 && !(est.tail_bound <= opts.tail_tolerance)) {
    const double suggested =
        p.generator.is_diagonal() ? suggest_truncation_radius(p, opts.tail_tolerance) : std::nan("");
    std::ostringstream os;
    os << "truncation at radius " << truncation_radius << " leaves tail bound " << est.tail_bound
       << " above tolerance " << opts.tail_tolerance << "; suggested radius " << suggested;
    throw TruncationError(os.str(), est.tail_bound, suggested);
  }
  auto parts =
      detail::run_partitions(n, opts.mc, [&](std::uint32_t k, std::int64_t count, detail::PartitionSums& out) {
        PhiloxStream rng(seed, detail::exponential_stream_offset + k);
        std::vector<double> xi(d);
        for (std::int64_t s = 0; s < count; ++s) {
          for (std::size_t i = 0; i < d; ++i) xi[i] = rng.uniform(-truncation_radius, truncation_radius);
          const double f = std::exp(-p(xi));
          out.sum += f;
          out.sum_sq += f * f;
        }
      });
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& s : parts) {
    sum += s.sum;
    sum_sq += s.sum_sq;
  }
  const double nn = static_cast<double>(n);
  const double vol = detail::box_volume(std::vector<double>(d, truncation_radius));
  const double mean_f = sum / nn;
  const double var_f = n > 1 ? std::max(0.0, (sum_sq - nn * mean_f * mean_f) / (nn - 1.0)) : 0.0;
  est.mean = vol * mean_f;
  est.std_error = vol * std::sqrt(var_f / nn);
  est.n_samples = n;
  return est;
}

/// sigma_P(S_P) = int e^{-P} / Gamma(mu_P).
inline McEstimate surface_mass(const HomogeneousGauge& p, double truncation_radius, std::int64_t n, std::uint64_t seed,
                               const ExponentialOptions& opts = {}) {
  McEstimate est = mc_gauge_exponential(p, truncation_radius, n, seed, opts);
  const double g = gamma(p.mu());
  est.mean /= g;
  est.std_error /= g;
  est.tail_bound /= g;
  return est;
}

struct GammaIdentityCheck {
  McEstimate volume;       // m(B_P)
  McEstimate exponential;  // int e^{-P}
  double predicted_volume; // int e^{-P} / Gamma(mu_P + 1)
  double z_score;          // |m - predicted| / combined std error
  double surface_z_score;  // same comparison as m(B_P) = sigma_P(S_P) / mu_P
};

namespace detail {

inline double z_score(double diff, double sigma) {
  if (sigma > 0.0) return std::abs(diff) / sigma;
  return std::abs(diff) <= 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
}

}  // namespace detail

/// Compares the MC volume of B_P with the exponential integral through
/// m(B_P) = int e^{-P} / Gamma(mu_P + 1).
inline GammaIdentityCheck gamma_identity_check(const HomogeneousGauge& p, const std::vector<double>& box_halfwidths,
                                               double truncation_radius, std::int64_t n, std::uint64_t seed,
                                               const ExponentialOptions& opts = {}) {
  GammaIdentityCheck out;
  out.volume = mc_ball_volume(p, box_halfwidths, n, seed, opts.mc);
  out.exponential = mc_gauge_exponential(p, truncation_radius, n, seed, opts);
  const double mu = p.mu();
  const double g1 = gamma(mu + 1.0);
  out.predicted_volume = out.exponential.mean / g1;
  const double sigma = std::hypot(out.volume.std_error, out.exponential.std_error / g1);
  out.z_score = detail::z_score(out.volume.mean - out.predicted_volume, sigma);
  const double g = gamma(mu);
  const double surface = out.exponential.mean / g;
  const double surface_sigma = std::hypot(out.volume.std_error, out.exponential.std_error / g / mu);
  out.surface_z_score = detail::z_score(out.volume.mean - surface / mu, surface_sigma);
  return out;
}

/// Default box and truncation radius (tail below 1e-9).
inline GammaIdentityCheck gamma_identity_check(const HomogeneousGauge& p, std::int64_t n, std::uint64_t seed,
                                               const ExponentialOptions& opts = {}) {
  return gamma_identity_check(p, default_volume_box(p), suggest_truncation_radius(p, 1e-9), n, seed, opts);
}

struct RadialReduction {
  McEstimate lhs;          // int Phi(P(xi)) d xi over the box
  double rhs;              // sigma_P(S_P) int Phi(r) r^{mu_P - 1} dr
  double rhs_std_error;    // from the surface-mass estimate
  double z_score;
};

/// Checks int Phi(P) = sigma_P(S_P) M[Phi](mu_P). The box must contain the
/// region where Phi(P(xi)) is non-negligible.
inline RadialReduction radial_reduction(const HomogeneousGauge& p, const TestFunction& phi,
                                        const std::vector<double>& box_halfwidths, double truncation_radius,
                                        const QuadratureConfig& cfg, std::int64_t n, std::uint64_t seed,
                                        const ExponentialOptions& opts = {}) {
  const std::size_t d = p.dim();
  detail::require(box_halfwidths.size() == d, "box dimension must match the gauge");
  phi.validate();
  RadialReduction out;
  auto parts =
      detail::run_partitions(n, opts.mc, [&](std::uint32_t k, std::int64_t count, detail::PartitionSums& acc) {
        PhiloxStream rng(seed, detail::reduction_stream_offset + k);
        std::vector<double> xi(d);
        for (std::int64_t s = 0; s < count; ++s) {
          for (std::size_t i = 0; i < d; ++i) xi[i] = rng.uniform(-box_halfwidths[i], box_halfwidths[i]);
          const double f = phi(p(xi));
          acc.sum += f;
          acc.sum_sq += f * f;
        }
      });
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& s : parts) {
    sum += s.sum;
    sum_sq += s.sum_sq;
  }
  const double nn = static_cast<double>(n);
  const double vol = detail::box_volume(box_halfwidths);
  const double mean_f = sum / nn;
  const double var_f = n > 1 ? std::max(0.0, (sum_sq - nn * mean_f * mean_f) / (nn - 1.0)) : 0.0;
  out.lhs.mean = vol * mean_f;
  out.lhs.std_error = vol * std::sqrt(var_f / nn);
  out.lhs.n_samples = n;
  out.lhs.seed = seed;
  const McEstimate sigma = surface_mass(p, truncation_radius, n, seed, opts);
  const double radial = mellin_transform(phi, p.mu(), cfg).value;
  out.rhs = sigma.mean * radial;
  out.rhs_std_error = sigma.std_error * std::abs(radial);
  out.z_score = detail::z_score(out.lhs.mean - out.rhs, std::hypot(out.lhs.std_error, out.rhs_std_error));
  return out;
}

/// Box {P < rho_max} for a diagonal generator: the default B_P box dilated
/// by rho_max^E.
inline std::vector<double> sublevel_box(const HomogeneousGauge& p, double rho_max) {
  detail::require(rho_max > 0.0 && std::isfinite(rho_max), "sublevel box needs a finite positive level");
  auto box = default_volume_box(p);
  for (std::size_t i = 0; i < box.size(); ++i)
    box[i] *= std::pow(rho_max, p.generator.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)));
  return box;
}

/// Closed-form volume of B_P for the shipped gauge families.
inline std::optional<double> reference_volume(const HomogeneousGauge& p) {
  if (p.diagonal_powers) {
    double log_val = 0.0, mu = 0.0;
    for (double b : *p.diagonal_powers) {
      log_val += std::log(2.0) + ln_gamma(1.0 + 1.0 / b);
      mu += 1.0 / b;
    }
    return std::exp(log_val - ln_gamma(1.0 + mu));
  }
  if (p.family == GaugeFamily::euclidean) return ball_volume(static_cast<double>(p.dim()));
  return std::nullopt;
}

/// Closed-form int e^{-P} for the shipped gauge families.
inline std::optional<double> reference_exponential(const HomogeneousGauge& p) {
  if (p.diagonal_powers) return diagonal_power_exponential_integral(*p.diagonal_powers);
  if (p.family == GaugeFamily::euclidean) {
    const double d = static_cast<double>(p.dim());
    return sphere_area(d) * gamma(d);
  }
  return std::nullopt;
}

}  // namespace cdim
