#include <doctest.h>

#include <cmath>
#include <numbers>

#include "smallcap/error.hpp"
#include "smallcap/parallel.hpp"
#include "smallcap/quadrature.hpp"
#include "smallcap/sharpness.hpp"

using namespace smallcap;

namespace {

// Average of e(d x) over [c, c + r].
Complex interval_average(double d, double c, double r) {
  if (d == 0.0) return 1.0;
  const double w = 2.0 * std::numbers::pi * d;
  return (std::polar(1.0, w * (c + r)) - std::polar(1.0, w * c)) / Complex(0.0, w * r);
}

double l2_local_oracle(const std::vector<double>& xi, const std::vector<Complex>& a, double r,
                       const Point3& corner) {
  Complex total = 0;
  for (std::size_t i = 0; i < xi.size(); ++i) {
    for (std::size_t j = 0; j < xi.size(); ++j) {
      const double d1 = xi[i] - xi[j];
      const double d2 = xi[i] * xi[i] - xi[j] * xi[j];
      const double d3 = xi[i] * xi[i] * xi[i] - xi[j] * xi[j] * xi[j];
      total += a[i] * std::conj(a[j]) * interval_average(d1, corner.x1, r) *
               interval_average(d2, corner.x2, r) * interval_average(d3, corner.x3, r);
    }
  }
  return total.real();
}

}  // namespace

TEST_CASE("quadrature reproduces the exact moments") {
  for (auto family : {CoeffFamily::constant, CoeffFamily::random_sign}) {
    for (std::int64_t n : {1, 3, 5}) {
      for (int s : {1, 2, 3}) {
        for (double sigma : {0.0, 1.0}) {
          ExpSumSpec spec{n, make_coeffs(family, n, 2), sigma, 0.0};
          const auto q = moment_quadrature(spec, 2.0 * s, 4.0);
          const auto e = moment_exact(spec, s);
          CHECK(q.value == doctest::Approx(e.value).epsilon(1e-3));
          CHECK(q.method == MomentMethod::quadrature);
          CHECK(q.err_estimate >= 0.0);
        }
      }
    }
  }
}

TEST_CASE("oversampled midpoint rule is exact along full periods") {
  // For sigma = 0 every axis is a full period: exact up to rounding.
  const auto spec = ExpSumSpec::ones(4);
  const auto q = moment_quadrature(spec, 4.0, 4.0);
  CHECK(q.value == doctest::Approx(2.0 * 16 - 4).epsilon(1e-12));
  CHECK(q.err_estimate < 1e-9);
}

TEST_CASE("odd real exponents are positive and bracketed by even ones") {
  const auto spec = ExpSumSpec::ones(4, 1.0);
  const double m2 = moment_quadrature(spec, 2.0).value;
  const double m3 = moment_quadrature(spec, 3.0).value;
  const double m4 = moment_quadrature(spec, 4.0).value;
  const double h = spec.h_length();
  // Lyapunov: log of the normalized L^p norm is convex in p.
  CHECK(std::log(m3 / h) <= 0.5 * (std::log(m2 / h) + std::log(m4 / h)) + 1e-9);
}

TEST_CASE("grid validation") {
  const auto spec = ExpSumSpec::ones(6, 1.0, 0.1);
  auto grid = QuadratureGrid::for_spec(spec, 4.0);
  CHECK(grid.counts.m1 >= 24u);
  CHECK(grid.counts.m2 >= 144u);
  CHECK_NOTHROW(grid.validate_for(spec));
  auto coarse = grid;
  coarse.counts.m2 = 10;
  CHECK_THROWS_AS(coarse.validate_for(spec), ValidationError);
  auto shifted = grid;
  shifted.box.lower.x3 = 0.0;
  CHECK_THROWS_AS(shifted.validate_for(spec), ValidationError);
  CHECK_THROWS_AS(moment_quadrature(spec, 4.0, 4.0, 100), BudgetExceeded);
  CHECK_THROWS_AS(moment_quadrature(spec, 0.0, 4.0), ValidationError);
}

TEST_CASE("box_integral of a constant is the box volume") {
  FrequencySet one{{{0.0, 0.0, 0.0}}, {Complex(2.0, 0.0)}};
  const Box3 box{{0.3, -1.0, 2.0}, {0.5, 2.0, 0.25}};
  CHECK(box_integral(one, box, {3, 5, 2}, 3.0) == doctest::Approx(8.0 * 0.25));
}

TEST_CASE("local moment at p = 2 against the pairwise closed form") {
  const double R = 64.0, beta = 0.5;
  const auto xi = separated_frequencies(R, beta);
  const auto a = make_coeffs(CoeffFamily::random_sign, static_cast<std::int64_t>(xi.size()), 3);
  for (double r : {64.0, 256.0}) {
    LocalMomentParams params;
    params.R = R;
    params.beta = beta;
    params.r = r;
    params.corner = {1.5, -2.0, 7.25};
    const auto got = local_moment_quadrature(xi, a, 2.0, params);
    CHECK(got.value == doctest::Approx(l2_local_oracle(xi, a, r, params.corner)).epsilon(1e-6));
  }
}

TEST_CASE("local moment: full grid and translates agree roughly at p = 4") {
  const auto xi = separated_frequencies(16.0, 0.5);
  const auto a = make_coeffs(CoeffFamily::random_sign, static_cast<std::int64_t>(xi.size()), 1);
  LocalMomentParams params;
  params.R = 16.0;
  params.beta = 0.5;
  params.r = 64.0;
  const auto full = local_moment_quadrature(xi, a, 4.0, params);
  params.full_grid_max_side = 32.0;
  params.translates = 256;
  const auto sampled = local_moment_quadrature(xi, a, 4.0, params);
  CHECK(full.value > 0.0);
  CHECK(std::abs(sampled.value - full.value) < 5.0 * sampled.err_estimate + 0.1 * full.value);
}

TEST_CASE("local moment input checks") {
  LocalMomentParams params;
  params.R = 16.0;
  params.beta = 0.5;
  params.r = 16.0;
  const std::vector<Complex> a2{1.0, 1.0};
  CHECK_THROWS_AS(local_moment_quadrature({0.0, 0.1}, a2, 4.0, params), ValidationError);
  CHECK_THROWS_AS(local_moment_quadrature({0.0, 1.5}, a2, 4.0, params), ValidationError);
  params.r = 8.0;
  CHECK_THROWS_AS(local_moment_quadrature({0.0, 0.5}, a2, 4.0, params), ValidationError);
  params.r = 16.0;
  CHECK_THROWS_AS(local_moment_quadrature({0.0, 0.5}, {1.0, 3.0}, 4.0, params), ValidationError);
}

TEST_CASE("rescaled periodicity identity holds for small N") {
  for (std::int64_t n : {1, 2, 3}) {
    for (double sigma : {0.0, 1.0}) {
      CHECK(periodicity_identity_check(ExpSumSpec::ones(n, sigma), 1) <= 1e-3);
    }
  }
  CHECK_THROWS_AS(periodicity_identity_check(ExpSumSpec::ones(9), 1), ValidationError);
}

TEST_CASE("results do not depend on the worker count") {
  const auto spec = ExpSumSpec::ones(5, 1.0, 0.2);
  set_worker_count(1);
  const double one = moment_quadrature(spec, 3.0).value;
  set_worker_count(3);
  const double three = moment_quadrature(spec, 3.0).value;
  set_worker_count(1);
  CHECK(one == three);
}
