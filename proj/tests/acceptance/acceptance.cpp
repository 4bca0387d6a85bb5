// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "smallcap/geometry.hpp"
#include "smallcap/moment.hpp"
#include "smallcap/quadrature.hpp"
#include "smallcap/rng.hpp"
#include "smallcap/sharpness.hpp"

using namespace smallcap;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const CoeffFamily kFamilies[] = {CoeffFamily::constant, CoeffFamily::random_sign,
                                 CoeffFamily::random_phase};

Outcome l2_identity() {
  Rng g(20240601);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto n = static_cast<std::int64_t>(1 + uniform_below(g, 500));
    const double sigma = static_cast<double>(uniform_below(g, 3));
    const auto family = kFamilies[i % 3];
    ExpSumSpec spec{n, make_coeffs(family, n, g()), sigma, 0.0};
    double l2 = 0.0;
    for (const auto& a : spec.coeffs) l2 += std::norm(a);
    const double want = std::pow(static_cast<double>(n), -sigma) * l2;
    worst = std::max(worst, rel_diff(moment_exact(spec, 1).value, want));
  }
  return {worst <= 1e-10, "100 specs, max rel err " + fmt("%.3g", worst)};
}

Outcome oracle_equivalence() {
  double worst_brute = 0.0, worst_quad = 0.0;
  int runs = 0;
  for (std::int64_t n = 1; n <= 10; ++n) {
    for (int s : {2, 3}) {
      for (auto family : {CoeffFamily::constant, CoeffFamily::random_sign}) {
        for (double sigma : {0.0, 1.0}) {
          for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            ExpSumSpec spec{n, make_coeffs(family, n, seed), sigma, 0.0};
            const double exact = moment_exact(spec, s).value;
            worst_brute = std::max(worst_brute, rel_diff(exact, moment_brute(spec, s).value));
            // Quadrature is deterministic in the coefficients; constant needs one seed.
            if (n <= 6 && (family != CoeffFamily::constant || seed == 1)) {
              const double q = moment_quadrature(spec, 2.0 * s, 4.0).value;
              worst_quad = std::max(worst_quad, rel_diff(exact, q));
            }
            ++runs;
          }
        }
      }
    }
  }
  return {worst_brute <= 1e-10 && worst_quad <= 1e-3,
          std::to_string(runs) + " cases, exact/brute max rel err " + fmt("%.3g", worst_brute) +
              ", quadrature max rel err " + fmt("%.3g", worst_quad)};
}

std::uint64_t naive_count(std::int64_t n) {
  std::uint64_t c = 0;
  for (std::int64_t a = 1; a <= n; ++a)
    for (std::int64_t b = 1; b <= n; ++b)
      for (std::int64_t x = 1; x <= n; ++x)
        for (std::int64_t y = 1; y <= n; ++y)
          if (a + b == x + y && a * a + b * b == x * x + y * y &&
              a * a * a + b * b * b == x * x * x + y * y * y)
            ++c;
  return c;
}

Outcome diagonal_law() {
  for (std::int64_t n = 1; n <= 12; ++n) {
    if (vinogradov_count(n, 2) != naive_count(n)) {
      return {false, "engine disagrees with direct count at N=" + std::to_string(n)};
    }
  }
  for (std::int64_t n = 1; n <= 200; ++n) {
    const auto got = vinogradov_count(n, 2);
    if (got != static_cast<std::uint64_t>(2 * n * n - n)) {
      return {false, "N=" + std::to_string(n) + " gives " + std::to_string(got)};
    }
  }
  return {true, "direct count agrees for N<=12; 2N^2-N holds for N<=200"};
}

Outcome mainexp_exponents() {
  SweepConfig a;
  a.N = {32, 48, 64, 96};
  a.sigma = 1.0;
  a.s = 4;
  const auto ra = verify_mainexp_bound(a);
  const bool pa = std::abs(ra.fit.slope - 3.0) <= 0.3;

  SweepConfig b;
  b.N = {64, 128, 256, 512};
  b.sigma = 0.0;
  b.s = 3;
  const auto rb = verify_mainexp_bound(b);
  const bool pb = rb.fit.slope >= 3.0 && rb.fit.slope <= 3.5;

  SweepConfig c;
  c.N = {64, 128, 256};
  c.sigma = 2.0;
  c.s = 2;
  c.family = CoeffFamily::random_sign;
  c.seeds.clear();
  for (std::uint64_t seed = 1; seed <= 20; ++seed) c.seeds.push_back(seed);
  const auto rc = verify_mainexp_bound(c);
  const bool pc = std::abs(rc.fit.slope) <= 0.3;

  return {pa && pb && pc, "(a) slope " + fmt("%.4f", ra.fit.slope) + (pa ? " ok" : " FAIL") +
                              ", (b) slope " + fmt("%.4f", rb.fit.slope) + (pb ? " ok" : " FAIL") +
                              ", (c) slope " + fmt("%.4f", rc.fit.slope) + (pc ? " ok" : " FAIL")};
}

Outcome interference_floor() {
  std::vector<double> ratios;
  std::string detail = "ratios";
  for (std::int64_t n : {16, 32, 64}) {
    const auto r = interference_lower_bound(ExpSumSpec::ones(n, 1.0), 4);
    ratios.push_back(r.ratio);
    detail += " " + fmt("%.4g", r.ratio);
  }
  const double spread = *std::max_element(ratios.begin(), ratios.end()) /
                        *std::min_element(ratios.begin(), ratios.end());
  return {spread < 4.0, detail + ", max/min " + fmt("%.4f", spread)};
}

Outcome maincor_trend() {
  MaincorConfig c;
  c.R = {256.0, 1024.0, 4096.0};
  c.beta = 0.5;
  c.p = 4.0;
  c.family = CoeffFamily::random_sign;
  const auto r4 = verify_maincor(c);
  c.p = 2.0;
  const auto r2 = verify_maincor(c);
  const bool p4 = r4.fit.slope <= 0.5 * 4.0 / 2.0 + 0.3;
  const bool p2 = std::abs(r2.fit.slope - 0.5) <= 1e-6;
  return {p4 && p2, "p=4 slope " + fmt("%.4f", r4.fit.slope) + " (limit 1.3), p=2 slope " +
                        fmt("%.9f", r2.fit.slope)};
}

Outcome geometry_suite() {
  const double R = 1048576.0;
  std::uint64_t violations = 0, samples = 0, case1 = 0, case2 = 0, runs = 0;
  double residual = 0.0;
  std::string first;
  auto add = [&](const GeometryReport& g, const std::string& label) {
    violations += g.violations;
    samples += g.samples;
    ++runs;
    if (g.violations > 0 && first.empty()) first = label;
  };
  for (double beta : {0.5, 0.75, 1.0}) {
    const auto ladder = ScaleLadder::build(R, beta, 0.05);
    const DecouplingParams params{R, beta};
    for (double c : {1.0, 4.0}) {
      for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const std::string tag =
            " beta=" + fmt("%g", beta) + " C=" + fmt("%g", c) + " seed=" + std::to_string(seed);
        for (std::size_t i = 0; i + 1 < ladder.r.size(); ++i) {
          const double rk = ladder.r[i], rn = ladder.r[i + 1];
          add(check_overlap_geo1(rk, rn, R, c, 10000, seed), "geo1" + tag);
          if (rk * rk >= R) {
            add(check_cone_containment_geo2(1, rk, rn, R, c, 0.0, 10000, seed), "geo2/1" + tag);
            ++case1;
          }
          if (rk * rk <= R && R > rk) {
            add(check_cone_containment_geo2(2, rk, rn, R, c, 0.0, 10000, seed), "geo2/2" + tag);
            ++case2;
          }
        }
        for (std::size_t i = 0; i + 1 < ladder.Rk.size(); ++i) {
          if (ladder.Rk[i] < 8.0) continue;
          add(check_cone_containment_geo3(ladder.Rk[i], ladder.Rk[i + 1], 0.0, c, 10000, seed),
              "geo3" + tag);
        }
        add(check_cap_partition(params, 10000, seed), "partition" + tag);
        for (std::int64_t l : {0, 3, 15}) {
          const auto g = check_rescale(4096.0, l, params, 10000, seed);
          residual = std::max(residual, g.max_residual);
          add(g, "rescale" + tag);
        }
      }
    }
  }
  const bool ok = violations == 0 && residual <= 1e-9 && case1 > 0 && case2 > 0;
  std::string detail = std::to_string(runs) + " runs, " + std::to_string(samples) +
                       " samples, " + std::to_string(violations) + " violations, geo2 case runs " +
                       std::to_string(case1) + "/" + std::to_string(case2) +
                       ", max curve residual " + fmt("%.3g", residual);
  if (!first.empty()) detail += ", first violation in " + first;
  return {ok, detail};
}

Outcome broad_narrow() {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto family = kFamilies[seed % 3];
    ExpSumSpec spec{64, make_coeffs(family, 64, seed), 0.0, 0.0};
    worst = std::max(worst, broad_narrow_check(spec, 16, 2, 10000, seed).max_ratio);
  }
  return {worst <= 1.0, "10 specs x 10^4 points, max ratio " + fmt("%.4f", worst)};
}

Outcome reduction_identity() {
  double worst = 0.0;
  for (std::int64_t n : {1, 2, 3}) {
    for (double sigma : {0.0, 1.0}) {
      worst = std::max(worst, periodicity_identity_check(ExpSumSpec::ones(n, sigma), 1));
    }
  }
  return {worst <= 1e-3, "max residual " + fmt("%.3g", worst)};
}

struct Criterion {
  int id;
  const char* name;
  double time_limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "L2 identity", 10.0, l2_identity},
      {2, "oracle equivalence", 120.0, oracle_equivalence},
      {3, "diagonal law", 60.0, diagonal_law},
      {4, "moment exponents", 1800.0, mainexp_exponents},
      {5, "interference floor", 300.0, interference_floor},
      {6, "local moment trend", 900.0, maincor_trend},
      {7, "geometry suite", 120.0, geometry_suite},
      {8, "broad/narrow", 60.0, broad_narrow},
      {9, "reduction identity", 120.0, reduction_identity},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.time_limit_s;
    const bool pass = out.pass && in_time;
    if (!pass) ++failed;
    std::printf("%s criterion %d (%s): %s; %.2f s (limit %.0f s)%s\n", pass ? "PASS" : "FAIL",
                c.id, c.name, out.detail.c_str(), secs, c.time_limit_s,
                in_time ? "" : " over time limit");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
