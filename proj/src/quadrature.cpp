#include "smallcap/quadrature.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <string>

#include "smallcap/error.hpp"
#include "smallcap/rng.hpp"
#include "smallcap/simd/kernels.hpp"

namespace smallcap {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::size_t count_for(double required) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(required - 1e-9)));
}

bool is_even_integer(double p, unsigned& half) {
  const double h = 0.5 * p;
  if (h >= 0.0 && h <= 64.0 && std::floor(h) == h) {
    half = static_cast<unsigned>(h);
    return true;
  }
  return false;
}

}  // namespace

QuadratureGrid QuadratureGrid::for_spec(const ExpSumSpec& spec, double oversample) {
  spec.validate();
  if (!(oversample >= 1.0) || !std::isfinite(oversample)) {
    throw ValidationError("oversample must be >= 1");
  }
  const double n = static_cast<double>(spec.N);
  const double len = spec.h_length();
  QuadratureGrid g;
  g.oversample = oversample;
  g.box.lower = {0.0, 0.0, spec.h0};
  g.box.sides = {1.0, 1.0, len};
  g.counts = {count_for(oversample * n), count_for(oversample * n * n),
              count_for(oversample * n * n * n * len)};
  return g;
}

void QuadratureGrid::validate_for(const ExpSumSpec& spec) const {
  if (!(oversample >= 1.0) || !std::isfinite(oversample)) {
    throw ValidationError("oversample must be >= 1");
  }
  const auto want = for_spec(spec, oversample);
  const double tol = 1e-12;
  if (std::abs(box.lower.x1) > tol || std::abs(box.lower.x2) > tol ||
      std::abs(box.lower.x3 - spec.h0) > tol || std::abs(box.sides[0] - 1.0) > tol ||
      std::abs(box.sides[1] - 1.0) > tol ||
      std::abs(box.sides[2] - spec.h_length()) > tol * std::max(1.0, spec.h_length())) {
    throw ValidationError("quadrature grid must cover [0,1]^2 x H exactly");
  }
  if (counts.m1 < want.counts.m1 || counts.m2 < want.counts.m2 || counts.m3 < want.counts.m3) {
    throw ValidationError("quadrature grid is coarser than the oversampling rule");
  }
}

double box_integral(const FrequencySet& sum, const Box3& box, const GridCounts& counts, double p,
                    std::size_t max_cells) {
  if (!(p > 0.0) || !std::isfinite(p)) throw ValidationError("exponent p must be > 0");
  const double cells = static_cast<double>(counts.m1) * static_cast<double>(counts.m2) *
                       static_cast<double>(counts.m3);
  if (cells > static_cast<double>(max_cells)) {
    throw BudgetExceeded("quadrature grid exceeds cell budget", cells,
                         static_cast<double>(max_cells));
  }
  unsigned half = 0;
  const bool even = is_even_integer(p, half);
  const auto& kt = simd::kernels();
  std::vector<double> plane_sums(counts.m3, 0.0);
  sweep_grid(sum, box, counts,
             [&](std::size_t, std::size_t i3, const double* re, const double* im) {
               plane_sums[i3] += even ? kt.abs_pow_sum_int(re, im, counts.m1, half)
                                      : simd::abs_pow_sum_real(re, im, counts.m1, p);
             });
  double total = 0.0;
  for (double v : plane_sums) total += v;
  const double volume = box.sides[0] * box.sides[1] * box.sides[2];
  return total * volume / cells;
}

MomentResult moment_quadrature(const ExpSumSpec& spec, double p, const QuadratureGrid& grid,
                               std::size_t max_cells) {
  const auto t0 = Clock::now();
  spec.validate();
  if (!(p >= 1.0)) throw ValidationError("exponent p must be >= 1");
  grid.validate_for(spec);
  const auto sum = FrequencySet::from_spec(spec);
  const double value = box_integral(sum, grid.box, grid.counts, p, max_cells);
  const auto coarse = QuadratureGrid::for_spec(spec, std::max(1.0, 0.5 * grid.oversample));
  const double coarse_value = box_integral(sum, coarse.box, coarse.counts, p, max_cells);
  MomentResult r;
  r.value = value;
  r.method = MomentMethod::quadrature;
  r.err_estimate = std::abs(value - coarse_value);
  r.wall_time = seconds_since(t0);
  return r;
}

MomentResult moment_quadrature(const ExpSumSpec& spec, double p, double oversample,
                               std::size_t max_cells) {
  return moment_quadrature(spec, p, QuadratureGrid::for_spec(spec, oversample), max_cells);
}

namespace {

void check_local_inputs(const std::vector<double>& freqs, const std::vector<Complex>& coeffs,
                        double p, const LocalMomentParams& params) {
  if (freqs.empty()) throw ValidationError("frequency set must be nonempty");
  if (freqs.size() != coeffs.size()) {
    throw ValidationError("frequency and coefficient lists differ in length");
  }
  if (!(p >= 1.0) || !std::isfinite(p)) throw ValidationError("exponent p must be >= 1");
  if (!(params.R >= 1.0)) throw ValidationError("R must be >= 1");
  if (!(params.beta >= 1.0 / 3.0 - 1e-12 && params.beta <= 1.0 + 1e-12)) {
    throw ValidationError("beta must lie in [1/3, 1]");
  }
  if (!(params.oversample >= 1.0)) throw ValidationError("oversample must be >= 1");
  const double min_r = std::pow(params.R, std::max(2.0 * params.beta, 1.0));
  if (params.r < min_r * (1.0 - 1e-9)) {
    throw ValidationError("cube side r must be >= R^max(2 beta, 1)");
  }
  std::vector<double> sorted = freqs;
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() < 0.0 || sorted.back() > 1.0) {
    throw ValidationError("frequencies must lie in [0, 1]");
  }
  const double sep = std::pow(params.R, -params.beta);
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] - sorted[i - 1] < sep * (1.0 - 1e-9)) {
      throw ValidationError("frequencies must be R^-beta separated");
    }
  }
  for (const auto& a : coeffs) {
    if (std::abs(a) > 1.0 + 1e-12) throw ValidationError("coefficients must satisfy |a| <= 1");
  }
}

// Grid resolving |sum|^p on a cube of the given side.
GridCounts cube_counts(const FrequencySet& fs, double side, double p, double oversample) {
  std::array<double, 3> lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
  for (const auto& f : fs.freqs) {
    for (std::size_t a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], f[a]);
      hi[a] = std::max(hi[a], f[a]);
    }
  }
  const double band = std::max(1.0, 0.5 * p);
  std::array<std::size_t, 3> m{};
  for (std::size_t a = 0; a < 3; ++a) m[a] = count_for(oversample * band * (hi[a] - lo[a]) * side);
  return {m[0], m[1], m[2]};
}

// (1/r) int_c^{c+r} e(delta x) dx
Complex interval_average(double delta, double c, double r) {
  if (delta == 0.0) return {1.0, 0.0};
  return unit_phase(delta * c) * (unit_phase(delta * r) - 1.0) /
         Complex(0.0, 2.0 * std::numbers::pi * delta * r);
}

double second_moment_closed_form(const FrequencySet& fs, const LocalMomentParams& params) {
  Complex total(0.0, 0.0);
  const std::array<double, 3> corner{params.corner.x1, params.corner.x2, params.corner.x3};
  for (std::size_t i = 0; i < fs.freqs.size(); ++i) {
    for (std::size_t j = 0; j < fs.freqs.size(); ++j) {
      Complex avg(1.0, 0.0);
      for (std::size_t a = 0; a < 3; ++a) {
        avg *= interval_average(fs.freqs[i][a] - fs.freqs[j][a], corner[a], params.r);
      }
      total += fs.coeffs[i] * std::conj(fs.coeffs[j]) * avg;
    }
  }
  return total.real();
}

}  // namespace

MomentResult local_moment_quadrature(const std::vector<double>& freqs,
                                     const std::vector<Complex>& coeffs, double p,
                                     const LocalMomentParams& params) {
  const auto t0 = Clock::now();
  check_local_inputs(freqs, coeffs, p, params);
  const auto fs = FrequencySet::moment_curve(freqs, coeffs);
  MomentResult result;

  if (params.r <= params.full_grid_max_side) {
    Box3 cube{params.corner, {params.r, params.r, params.r}};
    const auto counts = cube_counts(fs, params.r, p, params.oversample);
    const double volume = params.r * params.r * params.r;
    result.value = box_integral(fs, cube, counts, p, params.max_cells) / volume;
    const auto coarse = cube_counts(fs, params.r, p, std::max(1.0, 0.5 * params.oversample));
    result.err_estimate =
        std::abs(result.value - box_integral(fs, cube, coarse, p, params.max_cells) / volume);
    result.method = MomentMethod::quadrature;
  } else if (p == 2.0) {
    result.value = second_moment_closed_form(fs, params);
    result.err_estimate = 0.0;
    result.method = MomentMethod::exact;
  } else {
    if (params.translates < 2) throw ValidationError("need at least 2 translates");
    const double side = std::min(params.cell_side, params.r);
    const auto counts = cube_counts(fs, side, p, params.oversample);
    Rng rng(params.seed);
    std::vector<double> averages;
    averages.reserve(params.translates);
    const double cell_volume = side * side * side;
    for (std::size_t t = 0; t < params.translates; ++t) {
      Box3 cell;
      cell.lower = {params.corner.x1 + uniform(rng, 0.0, params.r - side),
                    params.corner.x2 + uniform(rng, 0.0, params.r - side),
                    params.corner.x3 + uniform(rng, 0.0, params.r - side)};
      cell.sides = {side, side, side};
      averages.push_back(box_integral(fs, cell, counts, p, params.max_cells) / cell_volume);
    }
    double mean = 0.0;
    for (double v : averages) mean += v;
    mean /= static_cast<double>(averages.size());
    double var = 0.0;
    for (double v : averages) var += (v - mean) * (v - mean);
    var /= static_cast<double>(averages.size() - 1);
    result.value = mean;
    result.err_estimate = std::sqrt(var / static_cast<double>(averages.size()));
    result.method = MomentMethod::quadrature;
  }
  result.wall_time = seconds_since(t0);
  return result;
}

double periodicity_identity_check(const ExpSumSpec& spec, int s, double oversample,
                                  std::size_t max_cells) {
  spec.validate();
  if (s < 1) throw ValidationError("s must be >= 1");
  if (spec.N > 4) throw ValidationError("periodicity identity check requires N <= 4");
  if (!(oversample >= 1.0)) throw ValidationError("oversample must be >= 1");
  const auto sum = FrequencySet::rescaled(spec);
  const double n = static_cast<double>(spec.N);
  const double n3 = n * n * n;
  const double z0 = n3 * spec.h0;
  const double zlen = n3 * spec.h_length();
  const double p = 2.0 * s;
  // The rescaled sum has frequencies at most 1 along every axis.
  const double band = static_cast<double>(s);
  auto counts_for_box = [&](const Box3& b) {
    return GridCounts{count_for(oversample * band * b.sides[0]),
                      count_for(oversample * band * b.sides[1]),
                      count_for(oversample * band * b.sides[2])};
  };
  const Box3 narrow{{0.0, 0.0, z0}, {n, n * n, zlen}};
  const Box3 wide{{0.0, 0.0, z0}, {n3, n3, zlen}};
  const double lhs = box_integral(sum, narrow, counts_for_box(narrow), p, max_cells);
  const double rhs = box_integral(sum, wide, counts_for_box(wide), p, max_cells) / n3;
  return std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-300);
}

}  // namespace smallcap
