#include "smallcap/sharpness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <set>
#include <stdexcept>

#include "smallcap/error.hpp"
#include "smallcap/rng.hpp"

namespace smallcap {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

double frac(double t) { return t - std::floor(t); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Fits the rows and records the smallest C with value <= C envelope.
void finish(SweepResult& out) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& row : out.rows) {
    pts.emplace_back(row.x, row.value);
    if (row.envelope > 0.0) {
      out.envelope_constant = std::max(out.envelope_constant, row.value / row.envelope);
    }
  }
  out.fit = exponent_fit(pts);
}

}  // namespace

std::string_view family_name(CoeffFamily f) {
  switch (f) {
    case CoeffFamily::constant:
      return "constant";
    case CoeffFamily::random_sign:
      return "random_sign";
    case CoeffFamily::random_phase:
      return "random_phase";
  }
  return "unknown";
}

CoeffFamily parse_family(std::string_view name) {
  std::string n(name);
  std::replace(n.begin(), n.end(), '-', '_');
  if (n == "constant") return CoeffFamily::constant;
  if (n == "random_sign") return CoeffFamily::random_sign;
  if (n == "random_phase") return CoeffFamily::random_phase;
  throw ValidationError("unknown coefficient family: " + std::string(name));
}

std::vector<Complex> constant_coeffs(std::int64_t n) {
  require(n >= 1, "N must be >= 1");
  return std::vector<Complex>(static_cast<std::size_t>(n), Complex(1.0, 0.0));
}

std::vector<Complex> random_sign_coeffs(std::int64_t n, std::uint64_t seed) {
  require(n >= 1, "N must be >= 1");
  Rng g(seed);
  std::vector<Complex> a(static_cast<std::size_t>(n));
  for (auto& v : a) v = Complex((g() >> 63) ? -1.0 : 1.0, 0.0);
  return a;
}

std::vector<Complex> random_phase_coeffs(std::int64_t n, std::uint64_t seed) {
  require(n >= 1, "N must be >= 1");
  Rng g(seed);
  std::vector<Complex> a(static_cast<std::size_t>(n));
  for (auto& v : a) v = unit_phase(uniform01(g));
  return a;
}

std::vector<Complex> make_coeffs(CoeffFamily f, std::int64_t n, std::uint64_t seed) {
  switch (f) {
    case CoeffFamily::constant:
      return constant_coeffs(n);
    case CoeffFamily::random_sign:
      return random_sign_coeffs(n, seed);
    case CoeffFamily::random_phase:
      return random_phase_coeffs(n, seed);
  }
  throw ValidationError("unknown coefficient family");
}

InterferenceResult interference_lower_bound(const ExpSumSpec& spec, int s, double oversample) {
  spec.validate();
  require(s >= 1, "s must be >= 1");
  require(oversample >= 1.0, "oversample must be >= 1");
  require(spec.h0 == 0.0, "the interference box needs h0 = 0");
  for (const auto& a : spec.coeffs) {
    require(a == Complex(1.0, 0.0), "the interference box needs a_k = 1");
  }
  const double n = static_cast<double>(spec.N);
  const double c = kInterferenceBoxFraction;
  Box3 box{{0.0, 0.0, 0.0}, {c / n, c / (n * n), c / (n * n * n)}};
  const auto m = static_cast<std::size_t>(std::max(16.0, std::ceil(oversample * s)));
  const double value =
      box_integral(FrequencySet::from_spec(spec), box, {m, m, m}, 2.0 * s);
  InterferenceResult r;
  r.value = value;
  r.ratio = value / std::pow(n, 2.0 * s - 6.0);
  r.floor = std::pow(std::cos(6.0 * std::numbers::pi * c), 2.0 * s) * c * c * c;
  if (!(r.ratio >= r.floor * (1.0 - 1e-9))) {
    throw std::runtime_error("interference integral fell below its analytic floor");
  }
  return r;
}

ExponentFit exponent_fit(const std::vector<std::pair<double, double>>& points) {
  require(points.size() >= 3, "exponent fit needs at least 3 points");
  std::set<double> distinct;
  for (const auto& [x, v] : points) {
    require(std::isfinite(x) && x > 0.0, "fit abscissae must be positive");
    require(std::isfinite(v) && v > 0.0, "fit values must be positive");
    distinct.insert(x);
  }
  require(distinct.size() >= 3, "exponent fit needs at least 3 distinct abscissae");
  const double m = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [x, v] : points) {
    sx += std::log(x);
    sy += std::log(v);
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, v] : points) {
    const double dx = std::log(x) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(v) - my);
  }
  ExponentFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.n_points = points.size();
  for (const auto& [x, v] : points) {
    fit.max_residual = std::max(
        fit.max_residual, std::abs(std::log(v) - (fit.intercept + fit.slope * std::log(x))));
  }
  return fit;
}

void SweepConfig::validate() const {
  std::set<std::int64_t> distinct(N.begin(), N.end());
  require(distinct.size() >= 3, "a sweep needs at least 3 distinct N values");
  for (auto n : N) require(n >= 1, "N values must be >= 1");
  require(std::is_sorted(N.begin(), N.end()), "N values must be increasing");
  require(s >= 1, "s must be >= 1");
  require(sigma >= 0.0 && sigma <= 2.0, "sigma must lie in [0, 2]");
  require(!seeds.empty(), "at least one seed is required");
  require(tolerance >= 0.0, "tolerance must be >= 0");
}

SweepResult verify_mainexp_bound(const SweepConfig& config) {
  config.validate();
  SweepResult out;
  out.kind = "mainexp";
  out.tolerance = config.tolerance;
  out.target = std::max(config.s - config.sigma, 2.0 * config.s - 6.0);
  const bool deterministic = config.family == CoeffFamily::constant && !config.random_h0;
  for (auto n : config.N) {
    std::vector<double> values;
    double err = 0.0;
    const std::size_t runs = deterministic ? 1 : config.seeds.size();
    for (std::size_t i = 0; i < runs; ++i) {
      const auto seed = config.seeds[i];
      ExpSumSpec spec;
      spec.N = n;
      spec.sigma = config.sigma;
      spec.coeffs = make_coeffs(config.family, n, seed);
      if (config.random_h0) {
        Rng g(seed ^ 0x5DEECE66DULL);
        spec.h0 = uniform01(g);
      } else {
        spec.h0 = config.h0;
      }
      MomentResult r;
      switch (config.method) {
        case MomentMethod::exact:
          r = moment_exact(spec, config.s, config.max_tuples);
          break;
        case MomentMethod::brute:
          r = moment_brute(spec, config.s);
          break;
        case MomentMethod::quadrature:
          r = moment_quadrature(spec, 2.0 * config.s, config.oversample, config.max_cells);
          break;
      }
      values.push_back(r.value);
      err = std::max(err, r.err_estimate);
    }
    const double nd = static_cast<double>(n);
    SweepRow row;
    row.x = nd;
    row.value = median(values);
    row.envelope = std::pow(nd, config.s - config.sigma) + std::pow(nd, 2.0 * config.s - 6.0);
    row.seed_count = values.size();
    row.method = std::string(method_name(config.method));
    row.err_estimate = err;
    out.rows.push_back(row);
    if (config.on_row) config.on_row(row);
  }
  finish(out);
  out.pass = std::abs(out.fit.slope - out.target) <= config.tolerance;
  return out;
}

void MaincorConfig::validate() const {
  std::set<double> distinct(R.begin(), R.end());
  require(distinct.size() >= 3, "a sweep needs at least 3 distinct R values");
  require(std::is_sorted(R.begin(), R.end()), "R values must be increasing");
  for (double r : R) require(std::isfinite(r) && r >= 2.0, "R values must be >= 2");
  require(beta >= 1.0 / 3.0 - 1e-12 && beta <= 1.0 + 1e-12, "beta must lie in [1/3, 1]");
  require(p >= 2.0 && p <= 6.0 + 2.0 / beta + 1e-12, "p must lie in [2, 6 + 2/beta]");
  require(!seeds.empty(), "at least one seed is required");
  require(tolerance >= 0.0, "tolerance must be >= 0");
}

std::vector<double> separated_frequencies(double R, double beta) {
  const double scale = std::pow(R, beta);
  const double snapped = std::abs(scale - std::round(scale)) <= 1e-9 * scale ? std::round(scale) : scale;
  const auto count = static_cast<std::size_t>(std::ceil(snapped));
  std::vector<double> xi(count);
  for (std::size_t j = 0; j < count; ++j) xi[j] = static_cast<double>(j) / snapped;
  return xi;
}

SweepResult verify_maincor(const MaincorConfig& config) {
  config.validate();
  SweepResult out;
  out.kind = "maincor";
  out.tolerance = config.tolerance;
  out.target = config.beta * config.p / 2.0;
  const bool deterministic = config.family == CoeffFamily::constant;
  for (double R : config.R) {
    const auto xi = separated_frequencies(R, config.beta);
    LocalMomentParams params;
    params.R = R;
    params.beta = config.beta;
    params.r = std::pow(R, std::max(2.0 * config.beta, 1.0));
    params.oversample = config.oversample;
    params.translates = config.translates;
    params.cell_side = config.cell_side;
    params.max_cells = config.max_cells;
    std::vector<double> values;
    double err = 0.0;
    MomentMethod method = MomentMethod::quadrature;
    const std::size_t runs = deterministic ? 1 : config.seeds.size();
    for (std::size_t i = 0; i < runs; ++i) {
      const auto seed = config.seeds[i];
      params.seed = seed;
      const auto coeffs = make_coeffs(config.family, static_cast<std::int64_t>(xi.size()), seed);
      const auto r = local_moment_quadrature(xi, coeffs, config.p, params);
      values.push_back(r.value);
      err = std::max(err, r.err_estimate);
      method = r.method;
    }
    SweepRow row;
    row.x = R;
    row.value = median(values);
    row.envelope = std::pow(R, out.target);
    row.seed_count = values.size();
    row.method = std::string(method_name(method));
    row.err_estimate = err;
    out.rows.push_back(row);
    if (config.on_row) config.on_row(row);
  }
  finish(out);
  out.pass = out.fit.slope <= out.target + config.tolerance;
  return out;
}

namespace {

void check_bands(int bands, int E) {
  require(E >= 1, "E must be >= 1");
  require(bands >= 3 * E, "need at least 3E bands");
}

}  // namespace

double broad_narrow_ratio(const ExpSumSpec& spec, int bands, int E, const Point3& x,
                          bool* narrow) {
  check_bands(bands, E);
  const std::int64_t n = spec.N;
  std::vector<Complex> part(static_cast<std::size_t>(bands), Complex(0.0, 0.0));
  const double x1 = frac(x.x1);
  const double x2 = frac(x.x2);
  const double x3 = frac(x.x3);
  Complex total(0.0, 0.0);
  for (std::int64_t k = 1; k <= n; ++k) {
    // Band of k/N in [0, 1]; k = N joins the last band.
    const auto b = std::min<std::int64_t>(bands - 1, (k * bands) / n);
    const double kd = static_cast<double>(k);
    const double t = frac(kd * x1) + frac(kd * kd * x2) + frac(kd * kd * kd * x3);
    const Complex term = spec.coeffs[static_cast<std::size_t>(k - 1)] * unit_phase(t);
    part[static_cast<std::size_t>(b)] += term;
    total += term;
  }
  std::vector<double> mag(part.size());
  double top = 0.0;
  for (std::size_t i = 0; i < part.size(); ++i) {
    mag[i] = std::abs(part[i]);
    top = std::max(top, mag[i]);
  }
  double tri = 0.0;
  for (int i = 0; i < bands; ++i) {
    for (int j = i + E; j < bands; ++j) {
      for (int k = j + E; k < bands; ++k) {
        tri = std::max(tri, std::cbrt(mag[static_cast<std::size_t>(i)] *
                                      mag[static_cast<std::size_t>(j)] *
                                      mag[static_cast<std::size_t>(k)]));
      }
    }
  }
  const double lhs = std::abs(total);
  if (narrow != nullptr) *narrow = lhs <= 4.0 * E * top;
  const double rhs = 4.0 * E * top + std::pow(static_cast<double>(bands), 5.0 / 3.0) * tri;
  if (rhs == 0.0) return lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return lhs / rhs;
}

BroadNarrowResult broad_narrow_check(const ExpSumSpec& spec, int bands, int E,
                                     std::uint64_t samples, std::uint64_t seed) {
  spec.validate();
  check_bands(bands, E);
  Rng g(seed);
  BroadNarrowResult out;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const Point3 x{uniform01(g), uniform01(g), uniform01(g)};
    bool narrow = false;
    const double ratio = broad_narrow_ratio(spec, bands, E, x, &narrow);
    ++out.samples;
    if (narrow) ++out.narrow_points;
    if (ratio > out.max_ratio || out.samples == 1) {
      out.max_ratio = ratio;
      out.worst = x;
    }
  }
  return out;
}

}  // namespace smallcap
