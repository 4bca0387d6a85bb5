#include "smallcap/expsum.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "smallcap/error.hpp"
#include "smallcap/parallel.hpp"
#include "smallcap/simd/kernels.hpp"

namespace smallcap {

namespace {

inline double frac(double t) { return t - std::floor(t); }

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw ValidationError(std::string(what) + " must be finite");
}

}  // namespace

Complex unit_phase(double t) {
  const double angle = 2.0 * std::numbers::pi * frac(t);
  return {std::cos(angle), std::sin(angle)};
}

double ExpSumSpec::h_length() const {
  return std::pow(static_cast<double>(N), -sigma);
}

void ExpSumSpec::validate() const {
  if (N < 1) throw ValidationError("N must be >= 1");
  if (coeffs.size() != static_cast<std::size_t>(N)) {
    throw ValidationError("expected " + std::to_string(N) + " coefficients, got " +
                          std::to_string(coeffs.size()));
  }
  require_finite(sigma, "sigma");
  require_finite(h0, "h0");
  if (sigma < 0.0 || sigma > 2.0) throw ValidationError("sigma must lie in [0, 2]");
  for (const auto& a : coeffs) {
    require_finite(a.real(), "coefficient");
    require_finite(a.imag(), "coefficient");
    if (std::abs(a) > 1.0 + 1e-12) throw ValidationError("coefficients must satisfy |a_k| <= 1");
  }
}

ExpSumSpec ExpSumSpec::ones(std::int64_t n, double sigma, double h0) {
  ExpSumSpec spec;
  spec.N = n;
  spec.coeffs.assign(static_cast<std::size_t>(n > 0 ? n : 0), Complex(1.0, 0.0));
  spec.sigma = sigma;
  spec.h0 = h0;
  return spec;
}

void FreqInterval::validate() const {
  if (!(0.0 <= lo && lo < hi && hi <= 1.0)) {
    throw ValidationError("frequency band must satisfy 0 <= lo < hi <= 1");
  }
}

bool FreqInterval::contains(std::int64_t k, std::int64_t n) const {
  const double kk = static_cast<double>(k);
  const double nn = static_cast<double>(n);
  return kk >= lo * nn && (kk < hi * nn || (hi >= 1.0 && kk <= nn));
}

namespace {

Complex sum_over(const ExpSumSpec& spec, const Point3& x, const FreqInterval* band) {
  const double x1 = frac(x.x1);
  const double x2 = frac(x.x2);
  const double x3 = frac(x.x3);
  Complex total(0.0, 0.0);
  for (std::int64_t k = 1; k <= spec.N; ++k) {
    if (band != nullptr && !band->contains(k, spec.N)) continue;
    const double kd = static_cast<double>(k);
    const double t = frac(kd * x1) + frac(kd * kd * x2) + frac(kd * kd * kd * x3);
    total += spec.coeffs[static_cast<std::size_t>(k - 1)] * unit_phase(t);
  }
  return total;
}

}  // namespace

Complex eval_sum(const ExpSumSpec& spec, const Point3& x) { return sum_over(spec, x, nullptr); }

Complex eval_partial_sum(const ExpSumSpec& spec, const FreqInterval& band, const Point3& x) {
  band.validate();
  return sum_over(spec, x, &band);
}

Point3 Box3::center() const {
  return {lower.x1 + 0.5 * sides[0], lower.x2 + 0.5 * sides[1], lower.x3 + 0.5 * sides[2]};
}

Grid3::Grid3(GridCounts counts, std::vector<Complex> values)
    : counts_(counts), values_(std::move(values)) {}

FrequencySet FrequencySet::from_spec(const ExpSumSpec& spec) {
  FrequencySet fs;
  fs.freqs.reserve(static_cast<std::size_t>(spec.N));
  for (std::int64_t k = 1; k <= spec.N; ++k) {
    const double kd = static_cast<double>(k);
    fs.freqs.push_back({kd, kd * kd, kd * kd * kd});
  }
  fs.coeffs = spec.coeffs;
  return fs;
}

FrequencySet FrequencySet::moment_curve(const std::vector<double>& points,
                                        const std::vector<Complex>& coeffs) {
  if (points.size() != coeffs.size()) {
    throw ValidationError("frequency and coefficient lists differ in length");
  }
  FrequencySet fs;
  fs.freqs.reserve(points.size());
  for (double xi : points) fs.freqs.push_back({xi, xi * xi, xi * xi * xi});
  fs.coeffs = coeffs;
  return fs;
}

FrequencySet FrequencySet::rescaled(const ExpSumSpec& spec) {
  const double n = static_cast<double>(spec.N);
  std::vector<double> points;
  points.reserve(static_cast<std::size_t>(spec.N));
  for (std::int64_t k = 1; k <= spec.N; ++k) points.push_back(static_cast<double>(k) / n);
  return moment_curve(points, spec.coeffs);
}

Complex FrequencySet::eval(const Point3& x) const {
  Complex total(0.0, 0.0);
  for (std::size_t j = 0; j < freqs.size(); ++j) {
    const auto& f = freqs[j];
    const double t = frac(f[0] * x.x1) + frac(f[1] * x.x2) + frac(f[2] * x.x3);
    total += coeffs[j] * unit_phase(t);
  }
  return total;
}

namespace {

void validate_grid(const Box3& box, const GridCounts& counts) {
  if (counts.m1 == 0 || counts.m2 == 0 || counts.m3 == 0) {
    throw ValidationError("grid counts must be >= 1");
  }
  for (double side : box.sides) {
    if (!(side > 0.0) || !std::isfinite(side)) throw ValidationError("box sides must be > 0");
  }
  require_finite(box.lower.x1, "box corner");
  require_finite(box.lower.x2, "box corner");
  require_finite(box.lower.x3, "box corner");
}

// Per-frequency phases e(f * x) at a starting point, and the per-step factors.
struct AxisPhases {
  std::vector<double> re, im;
};

void exact_phases(const FrequencySet& sum, int axis, double x, AxisPhases& out) {
  const std::size_t n = sum.freqs.size();
  out.re.resize(n);
  out.im.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Complex z = unit_phase(sum.freqs[k][static_cast<std::size_t>(axis)] * x);
    out.re[k] = z.real();
    out.im[k] = z.imag();
  }
}

}  // namespace

void sweep_grid(const FrequencySet& sum, const Box3& box, const GridCounts& counts,
                const LineVisitor& visit) {
  validate_grid(box, counts);
  const std::size_t n = sum.freqs.size();
  const double h1 = box.sides[0] / static_cast<double>(counts.m1);
  const double h2 = box.sides[1] / static_cast<double>(counts.m2);
  const double h3 = box.sides[2] / static_cast<double>(counts.m3);
  auto center = [](double lower, double h, std::size_t i) {
    return lower + (static_cast<double>(i) + 0.5) * h;
  };

  // Step factors along x1 and x2 are shared by every plane.
  AxisPhases step1, step2;
  exact_phases(sum, 0, h1, step1);
  exact_phases(sum, 1, h2, step2);

  // Exact x1 phases at the start of each reseed block.
  const std::size_t blocks1 = (counts.m1 + kPhaseReseedInterval - 1) / kPhaseReseedInterval;
  std::vector<AxisPhases> block_start1(blocks1);
  for (std::size_t b = 0; b < blocks1; ++b) {
    exact_phases(sum, 0, center(box.lower.x1, h1, b * kPhaseReseedInterval), block_start1[b]);
  }

  const auto& kt = simd::kernels();

  parallel_chunks(counts.m3, [&](std::size_t i3) {
    // c_k = a_k e(f3_k x3)
    AxisPhases plane;
    exact_phases(sum, 2, center(box.lower.x3, h3, i3), plane);
    for (std::size_t k = 0; k < n; ++k) {
      const Complex c = sum.coeffs[k] * Complex(plane.re[k], plane.im[k]);
      plane.re[k] = c.real();
      plane.im[k] = c.imag();
    }
    AxisPhases row;  // d_k = e(f2_k x2), advanced by recurrence
    AxisPhases cd;   // c_k d_k
    cd.re.resize(n);
    cd.im.resize(n);
    AxisPhases w;
    w.re.resize(n);
    w.im.resize(n);
    std::vector<double> line_re(counts.m1), line_im(counts.m1);

    for (std::size_t i2 = 0; i2 < counts.m2; ++i2) {
      if (i2 % kPhaseReseedInterval == 0) {
        exact_phases(sum, 1, center(box.lower.x2, h2, i2), row);
      } else {
        kt.complex_mul(row.re.data(), row.im.data(), step2.re.data(), step2.im.data(),
                       row.re.data(), row.im.data(), n);
      }
      kt.complex_mul(plane.re.data(), plane.im.data(), row.re.data(), row.im.data(),
                     cd.re.data(), cd.im.data(), n);
      for (std::size_t b = 0; b < blocks1; ++b) {
        const std::size_t start = b * kPhaseReseedInterval;
        const std::size_t steps = std::min(kPhaseReseedInterval, counts.m1 - start);
        kt.complex_mul(cd.re.data(), cd.im.data(), block_start1[b].re.data(),
                       block_start1[b].im.data(), w.re.data(), w.im.data(), n);
        kt.phase_sweep(w.re.data(), w.im.data(), step1.re.data(), step1.im.data(), n,
                       line_re.data() + start, line_im.data() + start, steps);
      }
      visit(i2, i3, line_re.data(), line_im.data());
    }
  });
}

Grid3 eval_grid(const ExpSumSpec& spec, const Box3& box, const GridCounts& counts,
                std::size_t max_cells) {
  spec.validate();
  validate_grid(box, counts);
  const double cells = static_cast<double>(counts.m1) * static_cast<double>(counts.m2) *
                       static_cast<double>(counts.m3);
  if (cells > static_cast<double>(max_cells)) {
    throw BudgetExceeded("grid exceeds memory budget", cells, static_cast<double>(max_cells));
  }
  std::vector<Complex> values(counts.cells());
  sweep_grid(FrequencySet::from_spec(spec), box, counts,
             [&](std::size_t i2, std::size_t i3, const double* re, const double* im) {
               Complex* row = values.data() + (i3 * counts.m2 + i2) * counts.m1;
               for (std::size_t i1 = 0; i1 < counts.m1; ++i1) row[i1] = Complex(re[i1], im[i1]);
             });
  return Grid3(counts, std::move(values));
}

}  // namespace smallcap
