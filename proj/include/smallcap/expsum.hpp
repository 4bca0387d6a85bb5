#pragma once

// Cubic exponential sums S(x) = sum_{k=1}^N a_k e(k x1 + k^2 x2 + k^3 x3),
// e(t) = exp(2 pi i t), evaluated pointwise, restricted to frequency bands,
// and on uniform grids of cell centers.

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace smallcap {

using Complex = std::complex<double>;

struct Point3 {
  double x1 = 0.0;
  double x2 = 0.0;
  double x3 = 0.0;
};

/// e(t) = exp(2 pi i t), with t reduced modulo 1 before the trig call.
Complex unit_phase(double t);

/// An exponential sum instance: frequencies k = 1..N with coefficients a_k,
/// integrated over [0,1]^2 x H where H = [h0, h0 + N^-sigma].
struct ExpSumSpec {
  std::int64_t N = 1;
  std::vector<Complex> coeffs;
  double sigma = 0.0;
  double h0 = 0.0;

  /// |H| = N^-sigma.
  double h_length() const;

  /// Throws ValidationError unless N >= 1, coeffs.size() == N, |a_k| <= 1 + 1e-12,
  /// sigma in [0, 2] and everything is finite.
  void validate() const;

  /// All coefficients equal to 1.
  static ExpSumSpec ones(std::int64_t n, double sigma = 0.0, double h0 = 0.0);
};

/// Half-open sub-interval [lo, hi) of the normalized frequency range k/N;
/// a band ending at 1 also holds k = N.
struct FreqInterval {
  double lo = 0.0;
  double hi = 1.0;

  void validate() const;
  bool contains(std::int64_t k, std::int64_t n) const;
};

Complex eval_sum(const ExpSumSpec& spec, const Point3& x);

/// Sum restricted to the k with k/N in [band.lo, band.hi).
Complex eval_partial_sum(const ExpSumSpec& spec, const FreqInterval& band, const Point3& x);

/// Axis-aligned box [lower, lower + sides].
struct Box3 {
  Point3 lower;
  std::array<double, 3> sides{1.0, 1.0, 1.0};

  Point3 center() const;
};

struct GridCounts {
  std::size_t m1 = 1;
  std::size_t m2 = 1;
  std::size_t m3 = 1;

  std::size_t cells() const { return m1 * m2 * m3; }
};

/// Values on the grid of cell centers, stored with i1 fastest.
class Grid3 {
 public:
  Grid3(GridCounts counts, std::vector<Complex> values);

  const GridCounts& counts() const { return counts_; }
  const Complex& at(std::size_t i1, std::size_t i2, std::size_t i3) const {
    return values_[(i3 * counts_.m2 + i2) * counts_.m1 + i1];
  }
  const std::vector<Complex>& values() const { return values_; }

 private:
  GridCounts counts_;
  std::vector<Complex> values_;
};

/// Default cap on materialized grid cells (16 bytes each).
inline constexpr std::size_t kDefaultGridCellBudget = std::size_t{1} << 26;

/// Interval between exact reseeds of the multiplicative phase recurrences.
inline constexpr std::size_t kPhaseReseedInterval = 4096;

/// Evaluates S at every cell center of `box` split into counts.m1 x m2 x m3
/// cells. Throws BudgetExceeded when counts.cells() > max_cells.
Grid3 eval_grid(const ExpSumSpec& spec, const Box3& box, const GridCounts& counts,
                std::size_t max_cells = kDefaultGridCellBudget);

/// A finite trigonometric sum x -> sum_j c_j e(x . f_j) with arbitrary real
/// frequency triples. Integer moment-curve sums and the continuous-frequency
/// sums used for local moments are both instances.
struct FrequencySet {
  std::vector<std::array<double, 3>> freqs;
  std::vector<Complex> coeffs;

  static FrequencySet from_spec(const ExpSumSpec& spec);
  /// Frequencies (xi, xi^2, xi^3) for each xi in `points`.
  static FrequencySet moment_curve(const std::vector<double>& points,
                                   const std::vector<Complex>& coeffs);
  /// Frequencies (k/N, k^2/N^2, k^3/N^3): the sum y -> S(y1/N, y2/N^2, y3/N^3).
  static FrequencySet rescaled(const ExpSumSpec& spec);

  Complex eval(const Point3& x) const;
};

/// Callback receiving one x1-line of grid values (m1 entries, split layout).
using LineVisitor =
    std::function<void(std::size_t i2, std::size_t i3, const double* re, const double* im)>;

/// Streams the grid of cell centers line by line without materializing it.
/// Planes (fixed i3) are processed independently and possibly concurrently;
/// the visitor must only touch state owned by plane i3.
void sweep_grid(const FrequencySet& sum, const Box3& box, const GridCounts& counts,
                const LineVisitor& visit);

}  // namespace smallcap
