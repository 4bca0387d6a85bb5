#include <doctest.h>

#include <cmath>
#include <numbers>

#include "smallcap/error.hpp"
#include "smallcap/expsum.hpp"
#include "smallcap/rng.hpp"
#include "smallcap/sharpness.hpp"

using namespace smallcap;

namespace {

// Straight from the definition, in long double.
Complex naive_sum(const ExpSumSpec& spec, const Point3& x) {
  std::complex<long double> acc = 0;
  for (std::int64_t k = 1; k <= spec.N; ++k) {
    const long double kk = k;
    const long double phase = kk * x.x1 + kk * kk * x.x2 + kk * kk * kk * x.x3;
    const long double t = 2 * std::numbers::pi_v<long double> * (phase - std::floor(phase));
    acc += std::complex<long double>(spec.coeffs[k - 1]) *
           std::complex<long double>(std::cos(t), std::sin(t));
  }
  return Complex(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
}

}  // namespace

TEST_CASE("unit_phase is exp(2 pi i t) and periodic") {
  for (double t : {0.0, 0.125, 0.25, 0.5, -0.3, 1.75}) {
    const Complex want = std::polar(1.0, 2.0 * std::numbers::pi * t);
    CHECK(std::abs(unit_phase(t) - want) < 1e-14);
  }
  CHECK(std::abs(unit_phase(1e6 + 0.25) - Complex(0.0, 1.0)) < 1e-9);
}

TEST_CASE("eval_sum matches a long double direct sum") {
  Rng g(3);
  for (auto family : {CoeffFamily::constant, CoeffFamily::random_sign, CoeffFamily::random_phase}) {
    for (std::int64_t n : {1, 2, 17, 100}) {
      ExpSumSpec spec{n, make_coeffs(family, n, 4), 0.0, 0.0};
      for (int i = 0; i < 20; ++i) {
        const Point3 x{uniform01(g), uniform01(g), uniform01(g)};
        CHECK(std::abs(eval_sum(spec, x) - naive_sum(spec, x)) < 1e-10 * n);
      }
    }
  }
}

TEST_CASE("S at the origin is the coefficient sum; integer shifts leave S unchanged") {
  const auto spec = ExpSumSpec::ones(25);
  CHECK(std::abs(eval_sum(spec, {0, 0, 0}) - Complex(25.0, 0.0)) < 1e-12);
  const Point3 x{0.3, 0.7, 0.11};
  CHECK(std::abs(eval_sum(spec, x) - eval_sum(spec, {1.3, -1.3, 2.11})) < 1e-10);
}

TEST_CASE("frequency bands partition the sum") {
  ExpSumSpec spec{40, make_coeffs(CoeffFamily::random_phase, 40, 2), 0.0, 0.0};
  const Point3 x{0.21, 0.43, 0.77};
  Complex total = 0;
  for (int b = 0; b < 5; ++b) total += eval_partial_sum(spec, {b / 5.0, (b + 1) / 5.0}, x);
  CHECK(std::abs(total - eval_sum(spec, x)) < 1e-11);
  CHECK(FreqInterval{0.0, 0.5}.contains(19, 40));
  CHECK_FALSE(FreqInterval{0.0, 0.5}.contains(20, 40));
  CHECK(FreqInterval{0.5, 1.0}.contains(40, 40));
}

TEST_CASE("eval_grid samples cell centers") {
  ExpSumSpec spec{12, make_coeffs(CoeffFamily::random_sign, 12, 8), 1.0, 0.3};
  const Box3 box{{0.0, 0.5, 0.3}, {1.0, 0.5, 1.0 / 12.0}};
  const GridCounts counts{9, 4, 3};
  const auto grid = eval_grid(spec, box, counts);
  for (std::size_t i3 = 0; i3 < 3; ++i3) {
    for (std::size_t i2 = 0; i2 < 4; ++i2) {
      for (std::size_t i1 = 0; i1 < 9; ++i1) {
        const Point3 x{box.lower.x1 + (i1 + 0.5) * box.sides[0] / 9,
                       box.lower.x2 + (i2 + 0.5) * box.sides[1] / 4,
                       box.lower.x3 + (i3 + 0.5) * box.sides[2] / 3};
        CHECK(std::abs(grid.at(i1, i2, i3) - naive_sum(spec, x)) < 1e-10);
      }
    }
  }
}

TEST_CASE("long x1 lines stay accurate across phase reseeds") {
  const auto spec = ExpSumSpec::ones(50);
  const std::size_t m1 = 3 * kPhaseReseedInterval + 17;
  const Box3 box{{0.0, 0.37, 0.61}, {1.0, 1e-3, 1e-3}};
  const auto grid = eval_grid(spec, box, {m1, 1, 1});
  for (std::size_t i1 : {std::size_t{0}, kPhaseReseedInterval - 1, kPhaseReseedInterval,
                         2 * kPhaseReseedInterval + 5, m1 - 1}) {
    const Point3 x{(i1 + 0.5) / m1, box.lower.x2 + 5e-4, box.lower.x3 + 5e-4};
    CHECK(std::abs(grid.at(i1, 0, 0) - naive_sum(spec, x)) < 1e-9);
  }
}

TEST_CASE("FrequencySet forms agree with eval_sum") {
  ExpSumSpec spec{7, make_coeffs(CoeffFamily::random_phase, 7, 1), 0.0, 0.0};
  const Point3 x{0.19, 0.58, 0.93};
  CHECK(std::abs(FrequencySet::from_spec(spec).eval(x) - eval_sum(spec, x)) < 1e-12);
  const Point3 y{7 * x.x1, 49 * x.x2, 343 * x.x3};
  CHECK(std::abs(FrequencySet::rescaled(spec).eval(y) - eval_sum(spec, x)) < 1e-11);
  std::vector<double> pts;
  for (int k = 1; k <= 7; ++k) pts.push_back(k);
  CHECK(std::abs(FrequencySet::moment_curve(pts, spec.coeffs).eval(x) - eval_sum(spec, x)) <
        1e-11);
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(ExpSumSpec::ones(0).validate(), ValidationError);
  CHECK_THROWS_AS(ExpSumSpec::ones(4, 2.5).validate(), ValidationError);
  CHECK_THROWS_AS(ExpSumSpec::ones(4, -0.1).validate(), ValidationError);
  ExpSumSpec big = ExpSumSpec::ones(3);
  big.coeffs[1] = 2.0;
  CHECK_THROWS_AS(big.validate(), ValidationError);
  ExpSumSpec short_coeffs = ExpSumSpec::ones(3);
  short_coeffs.coeffs.pop_back();
  CHECK_THROWS_AS(short_coeffs.validate(), ValidationError);
  CHECK(ExpSumSpec::ones(8, 1.0).h_length() == doctest::Approx(0.125));
  CHECK_THROWS_AS(eval_grid(ExpSumSpec::ones(3), {}, {1000, 1000, 1000}, 1000), BudgetExceeded);
}
