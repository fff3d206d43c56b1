// cdim: command-line front end.
//
// Exit codes: 0 success, 1 computation error (JSON error object on stdout),
// 2 usage error (message on stderr).

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cdim/axiom_lab.hpp"
#include "cdim/bm_counterexample.hpp"
#include "cdim/bm_route.hpp"
#include "cdim/homogeneous_polar.hpp"
#include "cdim/radial_measure.hpp"
#include "cdim/selftest.hpp"
#include "cdim/shift_cocycles.hpp"

namespace {

using json = nlohmann::ordered_json;

// Bad flag values or unreadable input files: exit 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Format { json, csv, plain };

using Field = std::variant<double, std::int64_t, bool, std::string, std::vector<std::string>>;

struct Record {
  std::vector<std::pair<std::string, Field>> fields;

  Record& add(std::string key, Field value) {
    fields.emplace_back(std::move(key), std::move(value));
    return *this;
  }
};

// nlohmann prints the shortest round-trip form; every numeric output here
// uses %.17g instead. Non-finite values become null.
void write_json(std::ostream& os, const json& j) {
  switch (j.type()) {
    case json::value_t::object: {
      os << '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ',';
        first = false;
        os << json(it.key()).dump() << ':';
        write_json(os, it.value());
      }
      os << '}';
      break;
    }
    case json::value_t::array: {
      os << '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ',';
        write_json(os, j[i]);
      }
      os << ']';
      break;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (std::isfinite(v)) {
        os << cdim::format_g17(v);
      } else {
        os << "null";
      }
      break;
    }
    default:
      os << j.dump();
  }
}

std::string json_line(const json& j) {
  std::ostringstream os;
  write_json(os, j);
  return os.str();
}

json to_json(const Field& f) {
  return std::visit([](const auto& v) { return json(v); }, f);
}

json to_json(const Record& r) {
  json j = json::object();
  for (const auto& [k, v] : r.fields) j[k] = to_json(v);
  return j;
}

std::string to_text(const Field& f) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          return cdim::format_g17(v);
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else {
          std::string s;
          for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "; " : "") + v[i];
          return s;
        }
      },
      f);
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

void emit(const std::vector<Record>& rows, Format fmt, bool as_array) {
  auto& os = std::cout;
  switch (fmt) {
    case Format::json: {
      if (as_array) {
        json arr = json::array();
        for (const auto& r : rows) arr.push_back(to_json(r));
        os << json_line(arr) << '\n';
      } else {
        os << json_line(to_json(rows.front())) << '\n';
      }
      break;
    }
    case Format::csv: {
      if (rows.empty()) break;
      for (std::size_t i = 0; i < rows.front().fields.size(); ++i)
        os << (i ? "," : "") << csv_cell(rows.front().fields[i].first);
      os << '\n';
      for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.fields.size(); ++i) os << (i ? "," : "") << csv_cell(to_text(r.fields[i].second));
        os << '\n';
      }
      break;
    }
    case Format::plain: {
      for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.fields.size(); ++i)
          os << (i ? " " : "") << r.fields[i].first << '=' << to_text(r.fields[i].second);
        os << '\n';
      }
      break;
    }
  }
}

void emit(const Record& r, Format fmt) { emit(std::vector<Record>{r}, fmt, false); }

// Knot CSV: optional header `u,phi`, then `u,phi` rows with strictly
// increasing u. Blank lines and lines starting with '#' are skipped.
cdim::TestFunction read_knots(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open knot file '" + path + "'");
  std::vector<double> us, phis;
  std::string line;
  int lineno = 0;
  auto parse = [&](const std::string& cell) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    while (end && (*end == ' ' || *end == '\t' || *end == '\r')) ++end;
    if (end == begin || *end != '\0' || !std::isfinite(v)) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": not a finite number: '" + cell + "'");
    }
    return v;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected two columns u,phi");
    }
    if (us.empty() && phis.empty() && line == "u,phi") continue;
    const double u = parse(line.substr(0, comma));
    const double phi = parse(line.substr(comma + 1));
    if (u < 0.0) throw UsageError(path + ":" + std::to_string(lineno) + ": u must be >= 0");
    if (!us.empty() && !(u > us.back())) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": u values must be strictly increasing");
    }
    us.push_back(u);
    phis.push_back(phi);
  }
  if (us.size() < 2) throw UsageError("knot file '" + path + "' needs at least two knots");
  return cdim::test_functions::piecewise_linear(std::move(us), std::move(phis));
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || *end != '\0') throw UsageError("malformed " + what + ": '" + text + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("malformed " + what + ": '" + text + "'");
  return out;
}

double parse_scalar(const std::string& text, const std::string& what) {
  const auto v = parse_list(text, what);
  if (v.size() != 1) throw UsageError("malformed " + what + ": '" + text + "'");
  return v.front();
}

json error_json(const std::exception& e) {
  json err;
  if (const auto* ce = dynamic_cast<const cdim::Error*>(&e)) {
    err["kind"] = ce->kind();
  } else {
    err["kind"] = "internal";
  }
  err["message"] = e.what();
  if (const auto* c = dynamic_cast<const cdim::ConvergenceError*>(&e)) {
    err["best_estimate"] = c->best_estimate();
    err["error_bound"] = c->error_bound();
  } else if (const auto* r = dynamic_cast<const cdim::RangeError*>(&e)) {
    err["log_value"] = r->log_value();
  } else if (const auto* n = dynamic_cast<const cdim::NotScalingCovariantError*>(&e)) {
    err["residual"] = n->residual();
  } else if (const auto* t = dynamic_cast<const cdim::TruncationError*>(&e)) {
    err["tail_bound"] = t->tail_bound();
    err["suggested_radius"] = t->suggested_radius();
  }
  return err;
}

// ---------------------------------------------------------------------------

struct VolumeArgs {
  std::optional<double> x, from, to;
  double step = 1.0;
};

void run_volume(const VolumeArgs& a, Format fmt) {
  std::vector<cdim::VolumeRow> rows;
  if (a.x) {
    if (a.from || a.to) throw UsageError("volume: use either --x or --from/--to, not both");
    rows = cdim::volume_table(*a.x, *a.x, 1.0);
  } else {
    if (!a.from || !a.to) throw UsageError("volume: need --x or both --from and --to");
    if (a.step > 0.0 && (*a.to - *a.from) / a.step > 1e6) throw UsageError("volume: table would exceed 10^6 rows");
    rows = cdim::volume_table(*a.from, *a.to, a.step);
  }
  if (fmt == Format::csv) {
    cdim::write_volume_csv(std::cout, rows);
    return;
  }
  std::vector<Record> out;
  for (const auto& r : rows) out.push_back(Record{}.add("x", r.x).add("V", r.V).add("C", r.C).add("omega", r.omega));
  emit(out, fmt, !a.x.has_value());
}

struct DensityArgs {
  double x = 0.0;
  std::vector<double> u;
};

void run_density(const DensityArgs& a, Format fmt) {
  const cdim::Dimension x(a.x);
  std::vector<Record> out;
  for (double u : a.u) out.push_back(Record{}.add("x", a.x).add("u", u).add("density", cdim::density(x, u)));
  emit(out, fmt, a.u.size() > 1);
}

struct QuadArgs {
  double rel_tol = 1e-10, abs_tol = 1e-14;
  int max_subdivisions = 2000;
  bool linear = false;

  cdim::QuadratureConfig config() const {
    cdim::QuadratureConfig cfg;
    cfg.rel_tol = rel_tol;
    cfg.abs_tol = abs_tol;
    cfg.max_subdivisions = max_subdivisions;
    cfg.log_substitution = !linear;
    return cfg;
  }
};

void add_quad_options(CLI::App* sub, QuadArgs& q) {
  sub->add_option("--rel-tol", q.rel_tol, "relative tolerance")->capture_default_str();
  sub->add_option("--abs-tol", q.abs_tol, "absolute tolerance")->capture_default_str();
  sub->add_option("--max-subdivisions", q.max_subdivisions, "subdivision budget")->capture_default_str();
  sub->add_flag("--no-log-substitution", q.linear, "integrate in u instead of t = log u");
}

Record quad_record(const cdim::QuadResult& r) {
  return Record{}
      .add("value", r.value)
      .add("error_estimate", r.error_estimate)
      .add("subdivisions", static_cast<std::int64_t>(r.subdivisions))
      .add("evaluations", static_cast<std::int64_t>(r.evaluations));
}

struct IntegrateArgs {
  double x = 0.0;
  std::string knots;
  QuadArgs quad;
};

void run_integrate(const IntegrateArgs& a, Format fmt) {
  const cdim::Dimension x(a.x);
  const auto cfg = a.quad.config();
  cfg.validate();
  const auto phi = read_knots(a.knots);
  Record rec;
  rec.add("x", a.x);
  for (auto& f : quad_record(cdim::integrate_functional(x, phi, cfg)).fields) rec.fields.push_back(std::move(f));
  emit(rec, fmt);
}

struct MellinArgs {
  double s = 0.0;
  std::string knots;
  QuadArgs quad;
};

void run_mellin(const MellinArgs& a, Format fmt) {
  const auto cfg = a.quad.config();
  cfg.validate();
  const auto phi = read_knots(a.knots);
  Record rec;
  rec.add("s", a.s);
  for (auto& f : quad_record(cdim::mellin_transform(phi, a.s, cfg)).fields) rec.fields.push_back(std::move(f));
  emit(rec, fmt);
}

struct AxiomArgs {
  double x = 0.0;
  std::string candidate = "classified";
  std::vector<double> lambdas = {0.5, 2.0, 10.0};
  double threshold = 1e-6;
  bool reconstruct = false;
};

cdim::CandidateDensity parse_candidate(const std::string& spec, const cdim::Dimension& x) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  auto need_arg = [&](const char* what) {
    if (arg.empty()) throw UsageError("candidate '" + name + "' needs an argument: " + what);
    return parse_scalar(arg, std::string("candidate ") + what);
  };
  auto no_arg = [&] {
    if (colon != std::string::npos) throw UsageError("candidate '" + name + "' takes no argument");
  };
  if (name == "classified") return no_arg(), cdim::candidates::classified(x);
  if (name == "scaled") return cdim::candidates::classified(x, need_arg("scale c"));
  if (name == "sinlog") return cdim::candidates::sin_log_modulated(x, arg.empty() ? 0.5 : need_arg("amplitude"));
  if (name == "mu") return cdim::candidates::classified(cdim::Dimension(need_arg("dimension")));
  if (name == "exp") return no_arg(), cdim::candidates::exponential();
  if (name == "power") return cdim::candidates::power_law(arg.empty() ? x.half() : need_arg("exponent a"));
  if (name == "knots") {
    if (arg.empty()) throw UsageError("candidate 'knots' needs a file: knots:<path>");
    auto f = read_knots(arg);
    return {[f](double u) { return f(u); }, "knots:" + arg};
  }
  throw UsageError("unknown candidate '" + spec + "' (classified, scaled:c, sinlog[:amp], mu:x, exp, power[:a], knots:file)");
}

void run_axioms(const AxiomArgs& a, Format fmt) {
  const cdim::Dimension x(a.x);
  const auto w = parse_candidate(a.candidate, x);
  cdim::AxiomCheckOptions opts;
  opts.lambdas = a.lambdas;
  opts.pass_threshold = a.threshold;
  const auto report = cdim::evaluate_axioms(w, x, opts);
  Record rec;
  rec.add("label", report.label)
      .add("x", report.x)
      .add("scaling_residual", report.scaling_residual)
      .add("gaussian_residual", report.gaussian_residual)
      .add("haar_flatness", report.haar_flatness)
      .add("verdict", std::string(cdim::to_string(report.verdict)));
  if (!report.warnings.empty()) rec.add("warnings", report.warnings);
  if (a.reconstruct) {
    try {
      const auto r = cdim::reconstruct(cdim::functional_of(w), cdim::test_functions::tent(0.5, 2.0), {0.5, 1, 2, 4, 10});
      rec.add("degree", r.degree).add("constant", r.constant).add("fit_residual", r.fit_residual);
    } catch (const cdim::NotScalingCovariantError& e) {
      rec.add("reconstruction_error", std::string(e.what()));
    }
  }
  emit(rec, fmt);
}

struct CocycleArgs {
  std::string kind = "T";
  double x = 0.0, r = 0.0, s = 0.0, a = 1.0;
};

void run_cocycle(const CocycleArgs& c, Format fmt) {
  cdim::CocycleKind kind;
  if (c.kind == "R") {
    kind = cdim::CocycleKind::radial();
  } else if (c.kind == "T") {
    kind = cdim::CocycleKind::ball();
  } else {
    kind = cdim::CocycleKind::sublevel(c.a);
  }
  const cdim::Dimension x(c.x);
  const double value = cdim::transport(kind, cdim::ShiftPair(c.x, c.r));
  const double residual = cdim::cocycle_residual(kind, x, c.r, c.s);
  Record rec;
  rec.add("kind", kind.name());
  if (kind.kind == cdim::CocycleKind::Kind::Ta) rec.add("a", c.a);
  rec.add("x", c.x).add("r", c.r).add("s", c.s).add("value", value).add("residual", residual);
  emit(rec, fmt);
}

struct BmArgs {
  double x = 0.0, r = 0.0;
  std::int64_t n = cdim::bm::default_terms;
  bool compare = false;
  std::optional<double> eps;
};

void run_bm(const BmArgs& b, Format fmt) {
  const double value = cdim::bm::bm_transport(b.x, b.r, b.n);
  Record rec;
  rec.add("x", b.x).add("r", b.r).add("n", b.n).add("value", value);
  if (b.compare) {
    const double closed = cdim::transport_T(cdim::ShiftPair(b.x, b.r));
    rec.add("closed_form", closed).add("relative_gap", std::abs(value - closed) / closed);
  }
  if (b.eps) {
    // Log-convexity of the reciprocal transport of V + eps sin(pi z) on r in [0, 3].
    const auto g = cdim::bm::counterexample_G(b.x, *b.eps, cdim::bm::uniform_grid(0.0, 3.0, 0.05));
    const auto c = cdim::bm::log_convexity_check(g);
    rec.add("eps", *b.eps)
        .add("min_second_difference", c.min_second_difference)
        .add("location", c.location)
        .add("log_convex", c.convex());
  }
  emit(rec, fmt);
}

struct PolarArgs {
  std::string gauge;
  std::string check = "gamma-identity";
  std::int64_t n = 1000000;
  std::uint32_t partitions = 64;
  unsigned threads = 0;
  std::optional<double> box, radius;
  bool no_closed_form = false;
};

cdim::HomogeneousGauge parse_gauge(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw UsageError("gauge must be euclidean:d or diagpow:b1,b2,...");
  const std::string family = spec.substr(0, colon);
  const std::string arg = spec.substr(colon + 1);
  if (family == "euclidean") {
    const double d = parse_scalar(arg, "euclidean dimension");
    if (!(d >= 1.0) || d != std::floor(d) || d > 1e6) throw UsageError("euclidean dimension must be a positive integer");
    return cdim::gauge_euclidean(static_cast<std::size_t>(d));
  }
  if (family == "diagpow") {
    const auto b = parse_list(arg, "diagonal powers");
    if (b.size() > cdim::default_max_dimension) {
      throw cdim::DomainError("dimension exceeds the configured maximum for box Monte Carlo");
    }
    return cdim::gauge_diagonal_power(b);
  }
  throw UsageError("unknown gauge family '" + family + "' (euclidean, diagpow)");
}

void run_polar(const PolarArgs& a, std::uint64_t seed, Format fmt) {
  const auto p = parse_gauge(a.gauge);
  cdim::ExponentialOptions opts;
  opts.mc = {a.partitions, a.threads};
  opts.use_closed_form = !a.no_closed_form;
  const auto box = a.box ? std::vector<double>(p.dim(), *a.box) : cdim::default_volume_box(p);
  const double radius = a.radius ? *a.radius : cdim::suggest_truncation_radius(p, 1e-9);

  double estimate = 0.0, std_error = 0.0, reference = std::nan(""), z = std::nan("");
  std::vector<std::string> diagnostics;
  auto z_against = [&](const std::optional<double>& ref) {
    if (!ref) return;
    reference = *ref;
    z = cdim::detail::z_score(estimate - reference, std_error);
  };
  if (a.check == "volume") {
    const auto est = cdim::mc_ball_volume(p, box, a.n, seed, opts.mc);
    estimate = est.mean;
    std_error = est.std_error;
    diagnostics = est.diagnostics;
    z_against(cdim::reference_volume(p));
  } else if (a.check == "exponential") {
    const auto est = cdim::mc_gauge_exponential(p, radius, a.n, seed, opts);
    estimate = est.mean;
    std_error = est.std_error;
    diagnostics = est.diagnostics;
    z_against(cdim::reference_exponential(p));
  } else {
    const auto c = cdim::gamma_identity_check(p, box, radius, a.n, seed, opts);
    const double g1 = cdim::gamma(p.mu() + 1.0);
    estimate = c.volume.mean;
    std_error = std::hypot(c.volume.std_error, c.exponential.std_error / g1);
    reference = c.predicted_volume;
    z = c.z_score;
    diagnostics = c.volume.diagnostics;
    for (const auto& d : c.exponential.diagnostics) diagnostics.push_back(d);
  }
  Record rec;
  rec.add("gauge", p.label)
      .add("check", a.check)
      .add("mu_P", p.mu())
      .add("estimate", estimate)
      .add("std_error", std_error)
      .add("reference", reference)
      .add("z_score", z)
      .add("n", a.n)
      .add("seed", static_cast<std::int64_t>(seed));
  if (!diagnostics.empty()) rec.add("diagnostics", diagnostics);
  emit(rec, fmt);
}

struct SelftestArgs {
  std::int64_t n = 1000000;
  double mutate_gamma = 0.0;
};

int run_selftest(const SelftestArgs& a, Format fmt) {
  if (a.n < 1) throw UsageError("selftest: --n must be >= 1");
  cdim::testing::ScopedGammaPerturbation mutate(a.mutate_gamma);
  const auto rep = cdim::selftest::run_all(a.n);
  if (fmt == Format::json) {
    std::cout << json_line(cdim::selftest::to_json(rep)) << '\n';
  } else {
    std::vector<Record> rows;
    for (const auto& c : rep.checks) {
      Record r;
      r.add("name", c.name).add("passed", c.passed).add("value", c.value).add("threshold", c.threshold);
      if (fmt == Format::csv || !c.error.empty()) r.add("error", c.error);
      rows.push_back(std::move(r));
    }
    emit(rows, fmt, true);
  }
  return rep.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous-dimension radial integration toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "json";
  std::uint64_t seed = 1;
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"json", "csv", "plain"}))
      ->capture_default_str();
  app.add_option("--seed", seed, "Monte Carlo seed (polar)")->capture_default_str();

  VolumeArgs volume;
  auto* s_volume = app.add_subcommand("volume", "V(x), C(x), omega(x) at a point or over a range");
  s_volume->add_option("--x", volume.x, "dimension");
  s_volume->add_option("--from", volume.from, "first x of a table");
  s_volume->add_option("--to", volume.to, "last x of a table");
  s_volume->add_option("--step", volume.step, "table step")->capture_default_str();

  DensityArgs density;
  auto* s_density = app.add_subcommand("density", "C(x) u^{x/2-1}");
  s_density->add_option("--x", density.x, "dimension")->required();
  s_density->add_option("--u", density.u, "radius (repeatable or comma separated)")->required()->delimiter(',');

  IntegrateArgs integ;
  auto* s_integrate = app.add_subcommand("integrate", "int phi d mu_x for a piecewise-linear phi");
  s_integrate->add_option("--x", integ.x, "dimension")->required();
  s_integrate->add_option("--knots", integ.knots, "CSV of u,phi knots")->required();
  add_quad_options(s_integrate, integ.quad);

  MellinArgs mellin;
  auto* s_mellin = app.add_subcommand("mellin", "int phi(u) u^{s-1} du for a piecewise-linear phi");
  s_mellin->add_option("--s", mellin.s, "Mellin variable")->required();
  s_mellin->add_option("--knots", mellin.knots, "CSV of u,phi knots")->required();
  add_quad_options(s_mellin, mellin.quad);

  AxiomArgs axioms;
  auto* s_axioms = app.add_subcommand("axioms", "check a candidate density against the two axioms");
  s_axioms->add_option("--x", axioms.x, "dimension")->required();
  s_axioms->add_option("--candidate", axioms.candidate,
                       "classified | scaled:c | sinlog[:amp] | mu:x | exp | power[:a] | knots:file")
      ->capture_default_str();
  s_axioms->add_option("--lambdas", axioms.lambdas, "dilation factors")->delimiter(',');
  s_axioms->add_option("--threshold", axioms.threshold, "pass threshold for residuals")->capture_default_str();
  s_axioms->add_flag("--reconstruct", axioms.reconstruct, "also recover (degree, constant)");

  CocycleArgs cocycle;
  auto* s_cocycle = app.add_subcommand("cocycle", "dimension-shift transport and cocycle residual");
  s_cocycle->add_option("--kind", cocycle.kind, "R | T | Ta")
      ->check(CLI::IsMember({"R", "T", "Ta"}))
      ->capture_default_str();
  s_cocycle->add_option("--x", cocycle.x, "dimension")->required();
  s_cocycle->add_option("--r", cocycle.r, "half-shift r (x -> x + 2r)")->required();
  s_cocycle->add_option("--s", cocycle.s, "second half-shift for the residual")->capture_default_str();
  s_cocycle->add_option("--a", cocycle.a, "sublevel radius for Ta")->capture_default_str();

  BmArgs bm;
  auto* s_bm = app.add_subcommand("bm", "ball-volume transport from recurrence and log-convexity");
  s_bm->add_option("--x", bm.x, "dimension")->required();
  s_bm->add_option("--r", bm.r, "half-shift r >= 0")->required();
  s_bm->add_option("--n", bm.n, "Euler product terms")->capture_default_str();
  s_bm->add_flag("--compare", bm.compare, "also print the closed form and the relative gap");
  s_bm->add_option("--eps", bm.eps, "check log-convexity of V + eps sin(pi z) at this x");

  PolarArgs polar;
  auto* s_polar = app.add_subcommand("polar", "Monte Carlo checks of the homogeneous Gamma identity");
  s_polar->add_option("--gauge", polar.gauge, "euclidean:d | diagpow:b1,b2,...")->required();
  s_polar->add_option("--check", polar.check, "gamma-identity | volume | exponential")
      ->check(CLI::IsMember({"gamma-identity", "volume", "exponential"}))
      ->capture_default_str();
  s_polar->add_option("--n", polar.n, "samples")->capture_default_str();
  s_polar->add_option("--partitions", polar.partitions, "sample partitions (changes the estimate)")
      ->capture_default_str();
  s_polar->add_option("--threads", polar.threads, "worker threads, 0 for all cores (never changes the estimate)")
      ->capture_default_str();
  s_polar->add_option("--box", polar.box, "volume box half-width (default from the gauge)");
  s_polar->add_option("--radius", polar.radius, "truncation radius for the exponential integral");
  s_polar->add_flag("--no-closed-form", polar.no_closed_form, "sample the exponential integral even when a closed form exists");

  SelftestArgs self;
  auto* s_self = app.add_subcommand("selftest", "run the invariant suite");
  s_self->add_option("--n", self.n, "Monte Carlo samples for the polar checks")->capture_default_str();
  s_self->add_option("--mutate-gamma", self.mutate_gamma, "testing: add p*x to ln Gamma; the suite must fail")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n"
              << "run with --help for usage\n";
    return 2;
  }

  const Format fmt = format == "csv" ? Format::csv : format == "plain" ? Format::plain : Format::json;
  try {
    if (*s_volume) run_volume(volume, fmt);
    else if (*s_density) run_density(density, fmt);
    else if (*s_integrate) run_integrate(integ, fmt);
    else if (*s_mellin) run_mellin(mellin, fmt);
    else if (*s_axioms) run_axioms(axioms, fmt);
    else if (*s_cocycle) run_cocycle(cocycle, fmt);
    else if (*s_bm) run_bm(bm, fmt);
    else if (*s_polar) run_polar(polar, seed, fmt);
    else if (*s_self) return run_selftest(self, fmt);
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cout.flush();
    std::cout << json_line(json{{"error", error_json(e)}}) << '\n';
    return 1;
  } catch (...) {
    std::cout << R"({"error":{"kind":"internal","message":"unknown exception"}})" << '\n';
    return 1;
  }
}
