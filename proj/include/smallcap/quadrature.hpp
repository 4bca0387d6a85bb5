#pragma once

// Midpoint-rule integration of |S|^p on uniform grids oversampled relative to
// the largest frequency of S along each axis. Along axes integrated over whole
// periods the rule is exact for the even-exponent trigonometric polynomials
// once the oversampling exceeds s.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "smallcap/expsum.hpp"
#include "smallcap/moment.hpp"

namespace smallcap {

inline constexpr double kDefaultOversample = 4.0;
/// Cells visited (streamed, not stored) per quadrature pass.
inline constexpr std::size_t kDefaultQuadratureCellBudget = 2'000'000'000;

struct QuadratureGrid {
  GridCounts counts;
  Box3 box;
  double oversample = kDefaultOversample;

  /// Grid over [0,1]^2 x H with m1 >= os N, m2 >= os N^2, m3 >= os N^3 |H|.
  static QuadratureGrid for_spec(const ExpSumSpec& spec, double oversample);

  /// Throws ValidationError unless the counts meet the oversampling rule for
  /// `spec` and the box is exactly [0,1]^2 x H.
  void validate_for(const ExpSumSpec& spec) const;
};

/// Midpoint estimate of int_box |sum|^p over the given cell grid.
double box_integral(const FrequencySet& sum, const Box3& box, const GridCounts& counts, double p,
                    std::size_t max_cells = kDefaultQuadratureCellBudget);

/// int_{[0,1]^2 x H} |S|^p. err_estimate = |value - value at oversample / 2|.
MomentResult moment_quadrature(const ExpSumSpec& spec, double p, const QuadratureGrid& grid,
                               std::size_t max_cells = kDefaultQuadratureCellBudget);

MomentResult moment_quadrature(const ExpSumSpec& spec, double p,
                               double oversample = kDefaultOversample,
                               std::size_t max_cells = kDefaultQuadratureCellBudget);

/// Cube Q_r = corner + [0, r]^3 and the parameters (R, beta) it is tested at.
struct LocalMomentParams {
  double R = 16.0;
  double beta = 0.5;
  double r = 16.0;
  Point3 corner;
  double oversample = 2.0;
  /// Cubes with side above this are estimated from random sub-cube translates.
  double full_grid_max_side = 64.0;
  std::size_t translates = 32;
  double cell_side = 4.0;
  std::uint64_t seed = 1;
  std::size_t max_cells = kDefaultQuadratureCellBudget;
};

/// |Q_r|^-1 int_{Q_r} |sum_xi a_xi e(x . (xi, xi^2, xi^3))|^p dx.
///
/// Frequencies must lie in [0,1] and be R^-beta separated; r >= R^max(2 beta, 1).
/// Cubes up to full_grid_max_side use a full midpoint grid. Larger cubes
/// average `translates` random sub-cubes of side cell_side and report the
/// standard error as err_estimate, except p = 2, which is evaluated in closed
/// form from the pairwise cube averages of e(x . (gamma(xi) - gamma(xi'))).
MomentResult local_moment_quadrature(const std::vector<double>& freqs,
                                     const std::vector<Complex>& coeffs, double p,
                                     const LocalMomentParams& params);

/// Relative discrepancy between the two sides of
///   int_{[0,N] x [0,N^2] x N^3 H} |S~|^{2s} = N^-3 int_{[0,N^3]^2 x N^3 H} |S~|^{2s},
/// S~(y) = sum a_k e(y . (k/N, k^2/N^2, k^3/N^3)), both sides by quadrature.
double periodicity_identity_check(const ExpSumSpec& spec, int s,
                                  double oversample = kDefaultOversample,
                                  std::size_t max_cells = kDefaultQuadratureCellBudget);

}  // namespace smallcap
