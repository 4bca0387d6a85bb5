#pragma once

// The two extremal examples (constant and random-sign coefficients), moment
// growth exponents fitted across N or R sweeps, and the pointwise broad/narrow
// inequality over frequency bands.

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "smallcap/expsum.hpp"
#include "smallcap/moment.hpp"
#include "smallcap/quadrature.hpp"

namespace smallcap {

enum class CoeffFamily { constant, random_sign, random_phase };

std::string_view family_name(CoeffFamily f);
/// Accepts "constant", "random_sign", "random_phase" (and '-' for '_').
CoeffFamily parse_family(std::string_view name);

std::vector<Complex> constant_coeffs(std::int64_t n);
/// a_k in {-1, +1} from the top bit of a seeded mt19937_64.
std::vector<Complex> random_sign_coeffs(std::int64_t n, std::uint64_t seed);
/// a_k = e(u_k) with u_k uniform in [0, 1).
std::vector<Complex> random_phase_coeffs(std::int64_t n, std::uint64_t seed);
std::vector<Complex> make_coeffs(CoeffFamily f, std::int64_t n, std::uint64_t seed);

struct InterferenceResult {
  double value = 0.0;  // integral of |S|^2s over the small box
  double ratio = 0.0;  // value / N^(2s - 6)
  double floor = 0.0;  // guaranteed lower bound for ratio
};

/// Box side fraction c in [0, c/N] x [0, c/N^2] x [0, c/N^3].
inline constexpr double kInterferenceBoxFraction = 0.05;

/// Quadrature of |S|^2s over the small box at the origin for a = 1, h0 = 0.
/// Every phase there is at most 3c, so |S| >= N cos(6 pi c) and
/// ratio >= cos(6 pi c)^2s c^3; a result below that floor throws.
InterferenceResult interference_lower_bound(const ExpSumSpec& spec, int s,
                                            double oversample = kDefaultOversample);

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;  // in log coordinates
  std::size_t n_points = 0;
};

/// Least-squares line through (log x, log value). Needs >= 3 distinct x and
/// positive values; throws ValidationError otherwise.
ExponentFit exponent_fit(const std::vector<std::pair<double, double>>& points);

struct SweepRow {
  double x = 0.0;  // N or R
  double value = 0.0;
  double envelope = 0.0;
  std::size_t seed_count = 0;
  std::string method;
  double err_estimate = 0.0;
};

struct SweepResult {
  std::string kind;
  std::vector<SweepRow> rows;
  ExponentFit fit;
  double target = 0.0;
  double tolerance = 0.0;
  /// max value / envelope over the rows, so value <= C envelope holds row by row.
  double envelope_constant = 0.0;
  bool pass = false;
};

struct SweepConfig {
  std::vector<std::int64_t> N;
  double sigma = 0.0;
  int s = 2;
  CoeffFamily family = CoeffFamily::constant;
  std::vector<std::uint64_t> seeds{1};
  double h0 = 0.0;
  /// Draw h0 uniformly from [0, 1) per seed instead of using the fixed value.
  bool random_h0 = false;
  double tolerance = 0.3;
  MomentMethod method = MomentMethod::exact;
  double oversample = kDefaultOversample;
  std::uint64_t max_tuples = kDefaultTupleBudget;
  std::size_t max_cells = kDefaultQuadratureCellBudget;
  /// Called after each completed row.
  std::function<void(const SweepRow&)> on_row;

  /// Throws ValidationError on fewer than 3 distinct N, bad s, empty seeds.
  void validate() const;
};

/// Moments per N (median over seeds unless the family is constant), fitted
/// against target max(s - sigma, 2s - 6). PASS when |slope - target| <= tolerance.
SweepResult verify_mainexp_bound(const SweepConfig& config);

struct MaincorConfig {
  std::vector<double> R;
  double beta = 0.5;
  double p = 4.0;
  CoeffFamily family = CoeffFamily::random_sign;
  std::vector<std::uint64_t> seeds{1};
  double tolerance = 0.3;
  double oversample = 2.0;
  std::size_t translates = 32;
  double cell_side = 4.0;
  std::size_t max_cells = kDefaultQuadratureCellBudget;
  std::function<void(const SweepRow&)> on_row;

  void validate() const;
};

/// Frequencies xi_j = j R^-beta, j < ceil(R^beta): one per cap, exactly R^-beta apart.
std::vector<double> separated_frequencies(double R, double beta);

/// Local moments on the cube [0, R^max(2 beta, 1)]^3 per R, fitted against
/// beta p / 2. PASS when slope <= target + tolerance.
SweepResult verify_maincor(const MaincorConfig& config);

struct BroadNarrowResult {
  double max_ratio = 0.0;
  Point3 worst;
  std::uint64_t samples = 0;
  std::uint64_t narrow_points = 0;  // |S| <= 4 E max band
};

/// |S(x)| / (4E max_b |S_b(x)| + B^(5/3) max_{separated triples} |S_i S_j S_k|^(1/3)),
/// with B bands of k/N and triples pairwise at least E bands apart.
double broad_narrow_ratio(const ExpSumSpec& spec, int bands, int E, const Point3& x,
                          bool* narrow = nullptr);

/// Max of broad_narrow_ratio over uniform samples in [0,1]^3. Throws
/// ValidationError when bands < 3E or E < 1.
BroadNarrowResult broad_narrow_check(const ExpSumSpec& spec, int bands, int E,
                                     std::uint64_t samples, std::uint64_t seed);

}  // namespace smallcap
