#include "smallcap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "smallcap/error.hpp"
#include "smallcap/parallel.hpp"
#include "smallcap/rng.hpp"

namespace smallcap {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr std::uint64_t kChunk = 1024;
// Rejection-sampled checks give up after this many attempts per requested sample.
constexpr std::uint64_t kAttemptFactor = 400;

double snap_integer(double v) {
  const double n = std::round(v);
  return std::abs(v - n) <= 1e-9 * std::max(1.0, std::abs(v)) ? n : v;
}

std::int64_t ceil_count(double v) { return static_cast<std::int64_t>(std::ceil(snap_integer(v))); }

void require(bool ok, const char* message) {
  if (!ok) throw ValidationError(message);
}

bool within(double v, double bound, double slack) { return std::abs(v) <= bound * slack; }

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t chunk) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (chunk + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double random_sign(Rng& g) { return (g() >> 63) ? -1.0 : 1.0; }

// Splits `samples` into fixed chunks with independent generators and merges
// the chunk reports in order, so results do not depend on the worker count.
template <class Body>
GeometryReport run_chunked(const std::string& name, std::uint64_t samples, std::uint64_t seed,
                           Body body) {
  const std::uint64_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<GeometryReport> parts(chunks);
  parallel_chunks(chunks, [&](std::size_t c) {
    Rng g(mix_seed(seed, c));
    const std::uint64_t n = std::min<std::uint64_t>(kChunk, samples - c * kChunk);
    body(g, parts[c], n);
  });
  GeometryReport out;
  out.check = name;
  for (const auto& p : parts) out.merge(p);
  return out;
}

void record_violation(GeometryReport& rep, const Vec3& v) {
  if (rep.violations == 0 && !rep.first_violation) rep.first_violation = v;
  ++rep.violations;
}

// Number of sectors occupied by omega(l / scale), l in [0, count). Omega is
// monotone in l, so sector changes are counted in one pass.
std::uint64_t occupied_sectors(const ConePartition& part, std::int64_t count, double scale) {
  std::uint64_t used = 0;
  std::int64_t last = 0;
  for (std::int64_t l = 0; l < count; ++l) {
    const auto j = part.sector_of(cone_angle(static_cast<double>(l) / scale));
    if (l == 0 || j != last) ++used;
    last = j;
  }
  return used;
}

// Sectors meeting the angle range [omega(1), pi/2] of the frame directions.
std::uint64_t spanned_sectors(const ConePartition& part) {
  return static_cast<std::uint64_t>(part.sector_of(std::numbers::pi / 2.0) -
                                    part.sector_of(cone_angle(1.0)) + 1);
}

std::vector<double> dyadics_between(double lo, double hi) {
  std::vector<double> out;
  for (double v = dyadic_ceil(lo * (1.0 - 1e-12)); v <= hi * (1.0 + 1e-12); v *= 2.0) {
    out.push_back(v);
  }
  return out;
}

// Rounding allowances for the defects of a point y computed as M x + b.
struct DefectTolerance {
  double psi = 0.0;
  double phi = 0.0;
};

DefectTolerance mapped_defect_tolerance(const AffineMap3& map, const Vec3& x, const Vec3& y) {
  std::array<double, 3> e{};
  for (int i = 0; i < 3; ++i) {
    double mag = std::abs(map.offset[i]);
    for (int j = 0; j < 3; ++j) mag += std::abs(map.matrix(i, j) * x[j]);
    // The source point carries its own representation error of relative size eps.
    e[i] = 8.0 * kEps * mag;
  }
  const double y1 = std::abs(y[0]), y2 = std::abs(y[1]), y3 = std::abs(y[2]);
  DefectTolerance t;
  t.psi = e[1] + 2.0 * y1 * e[0] + 4.0 * kEps * (y2 + y1 * y1);
  t.phi = e[2] + 3.0 * (y1 * e[1] + y2 * e[0]) + 6.0 * y1 * y1 * e[0] +
          8.0 * kEps * (y3 + 3.0 * y1 * y2 + 2.0 * y1 * y1 * y1);
  return t;
}

// A point of the neighborhood at scales (S, R): xi1 given, defects given.
Vec3 point_with_defects(double xi1, double psi, double phi) {
  const double xi2 = xi1 * xi1 + psi;
  const double xi3 = 3.0 * xi1 * xi2 - 2.0 * xi1 * xi1 * xi1 + phi;
  return {xi1, xi2, xi3};
}

}  // namespace

// ---------------------------------------------------------------- params

void DecouplingParams::validate() const {
  require(std::isfinite(R) && R >= 2.0, "R must be >= 2");
  require(std::isfinite(beta) && beta >= 1.0 / 3.0 - 1e-12 && beta <= 1.0 + 1e-12,
          "beta must lie in [1/3, 1]");
}

double DecouplingParams::cap_scale() const { return snap_integer(std::pow(R, beta)); }

std::int64_t DecouplingParams::cap_count() const { return ceil_count(std::pow(R, beta)); }

std::array<double, 3> DecouplingParams::cap_dims() const {
  const double s = cap_scale();
  return {1.0 / s, 1.0 / (s * s), 1.0 / R};
}

double DecouplingParams::spatial_scale() const { return std::pow(R, std::max(2.0 * beta, 1.0)); }

Defects defects(const Point3& xi) {
  Defects d;
  d.psi = xi.x2 - xi.x1 * xi.x1;
  d.phi = xi.x3 - 3.0 * xi.x1 * xi.x2 + 2.0 * xi.x1 * xi.x1 * xi.x1;
  return d;
}

bool in_neighborhood(const Point3& xi, double S, double R) {
  if (!(xi.x1 >= 0.0 && xi.x1 <= 1.0)) return false;
  const auto d = defects(xi);
  return std::abs(d.psi) <= 1.0 / (S * S) && std::abs(d.phi) <= 1.0 / R;
}

bool neighborhood_membership(const DecouplingParams& params, const Point3& xi) {
  params.validate();
  if (!(xi.x1 >= 0.0 && xi.x1 <= 1.0)) return false;
  const auto d = defects(xi);
  return std::abs(d.psi) <= std::pow(params.R, -2.0 * params.beta) &&
         std::abs(d.phi) <= 1.0 / params.R;
}

std::optional<std::int64_t> cap_index_of(const DecouplingParams& params, const Point3& xi) {
  if (!neighborhood_membership(params, xi)) return std::nullopt;
  const auto l = static_cast<std::int64_t>(std::floor(xi.x1 * params.cap_scale()));
  return std::clamp<std::int64_t>(l, 0, params.cap_count() - 1);
}

bool SmallCap::contains(const Point3& xi) const {
  if (l < 0 || l >= params.cap_count()) return false;
  if (!neighborhood_membership(params, xi)) return false;
  const double s = params.cap_scale();
  const double lo = static_cast<double>(l) / s;
  const double hi = static_cast<double>(l + 1) / s;
  const bool last = l == params.cap_count() - 1;
  return xi.x1 >= lo && (xi.x1 < hi || (last && xi.x1 <= 1.0));
}

bool CanonicalBlock::contains(const Point3& xi) const {
  if (l < 0 || static_cast<double>(l) >= S) return false;
  const double lo = static_cast<double>(l) / S;
  const double hi = static_cast<double>(l + 1) / S;
  if (!(xi.x1 >= lo && xi.x1 < hi && xi.x1 <= 1.0)) return false;
  const auto d = defects(xi);
  return std::abs(d.psi) <= 1.0 / (S * S) && std::abs(d.phi) <= 1.0 / (S * S * S);
}

// ---------------------------------------------------------------- frames

Vec3 moment_curve(double t) { return {t, t * t, t * t * t}; }

std::array<Vec3, 3> frenet_frame(double t) {
  return {Vec3(1.0, 2.0 * t, 3.0 * t * t), Vec3(0.0, 2.0, 6.0 * t), Vec3(0.0, 0.0, 6.0)};
}

Vec3 frame_coords(double t, const Vec3& v) {
  const double A = v[0];
  const double B = (v[1] - 2.0 * t * A) / 2.0;
  const double C = (v[2] - 3.0 * t * t * A - 6.0 * t * B) / 6.0;
  return {A, B, C};
}

Vec3 ParamBox::point(double A, double B, double C) const {
  const auto f = frenet_frame(t0);
  return A * f[0] + B * f[1] + C * f[2];
}

bool ParamBox::contains(const Vec3& v, double slack) const {
  const Vec3 c = frame_coords(t0, v);
  const double a = std::abs(c[0]);
  return a >= a_min / slack && a <= a_max * slack && within(c[1], b_max, slack) &&
         within(c[2], c_max, slack);
}

ParamBox gamma_tilde(double r_k, double r_next, double R, std::int64_t l, double c_eps) {
  require(std::isfinite(r_k) && r_k >= 1.0, "r_k must be >= 1");
  require(std::isfinite(r_next) && r_next >= r_k, "r_next must be >= r_k");
  require(std::isfinite(R) && R >= 1.0, "R must be >= 1");
  require(std::isfinite(c_eps) && c_eps > 0.0, "C_eps must be positive");
  require(l >= 0 && static_cast<double>(l) < r_k, "l must lie in [0, r_k)");
  ParamBox box;
  box.t0 = static_cast<double>(l) / r_k;
  box.a_min = 0.5 / r_next;
  box.a_max = c_eps / r_k;
  box.b_max = c_eps / (r_k * r_k);
  box.c_max = c_eps / R;
  require(box.a_min <= box.a_max, "empty A range: need r_next >= r_k / (2 C_eps)");
  return box;
}

AffineMap3 AffineMap3::inverse() const {
  const double det = determinant();
  if (!(std::abs(det) >= 1e-12)) throw ValidationError("affine map is not invertible");
  AffineMap3 inv;
  inv.matrix = matrix.inverse();
  inv.offset = -(inv.matrix * offset);
  return inv;
}

AffineMap3 AffineMap3::compose(const AffineMap3& other) const {
  AffineMap3 out;
  out.matrix = matrix * other.matrix;
  out.offset = matrix * other.offset + offset;
  return out;
}

AffineMap3 cone_map_T() {
  AffineMap3 t;
  t.matrix << 0.0, 0.5, 0.0,
              1.0 / kSqrt2, 0.0, -1.0 / (6.0 * kSqrt2),
              1.0 / kSqrt2, 0.0, 1.0 / (6.0 * kSqrt2);
  return t;
}

AffineMap3 rescale_map_L(double R_prev, std::int64_t l) {
  require(std::isfinite(R_prev) && R_prev >= 1.0, "R_prev must be >= 1");
  const double a = snap_integer(std::cbrt(R_prev));
  const double ld = static_cast<double>(l);
  require(l >= 0 && ld < a, "l must lie in [0, R_prev^(1/3))");
  const double a2 = a * a, a3 = a2 * a;
  // Rows act on u = xi - gamma(l / a).
  AffineMap3 m;
  m.matrix << a, 0.0, 0.0,
              -2.0 * ld * a, a2, 0.0,
              3.0 * ld * ld * a, -3.0 * ld * a2, a3;
  const Vec3 base = moment_curve(ld / a);
  m.offset = -(m.matrix * base);
  return m;
}

Vec3 ConeFrame::coords(const Vec3& v) const {
  const double c = std::cos(omega), s = std::sin(omega);
  const double radial = c * v[0] + s * v[1];
  return {(radial + v[2]) / 2.0, s * v[0] - c * v[1], (radial - v[2]) / 2.0};
}

double cone_angle(double t) {
  const double den = 2.0 + t * t;
  return std::atan2((2.0 - t * t) / den, 2.0 * kSqrt2 * t / den);
}

std::int64_t ConePartition::sector_of(double omega) const {
  return static_cast<std::int64_t>(std::floor(omega / w_ang));
}

double ConePartition::sector_center(std::int64_t j) const {
  return (static_cast<double>(j) + 0.5) * w_ang;
}

bool ConePartition::contains(std::int64_t sector, const Vec3& p, double slack) const {
  const Vec3 c = ConeFrame{sector_center(sector)}.coords(p);
  const double pad = K * w_norm * slack;
  return c[0] >= 0.5 - pad && c[0] <= 1.0 + pad && within(c[1], K * w_ang, slack) &&
         within(c[2], K * w_norm, slack);
}

double dyadic_closest(double x) {
  require(x > 0.0 && std::isfinite(x), "dyadic_closest needs x > 0");
  return std::exp2(std::round(std::log2(x)));
}

double dyadic_ceil(double x) {
  require(x > 0.0 && std::isfinite(x), "dyadic_ceil needs x > 0");
  return std::exp2(std::ceil(std::log2(x) - 1e-12));
}

ScaleLadder ScaleLadder::build(double R, double beta, double eps) {
  require(std::isfinite(R) && R >= 2.0, "R must be >= 2");
  require(beta >= 1.0 / 3.0 - 1e-12 && beta <= 1.0 + 1e-12, "beta must lie in [1/3, 1]");
  require(std::isfinite(eps) && eps > 0.0 && eps <= 1.0, "eps must lie in (0, 1]");
  ScaleLadder ladder;
  auto push = [](std::vector<double>& v, double x) {
    if (v.empty() || v.back() != x) v.push_back(x);
  };
  for (int k = 0;; ++k) {
    const double e = 1.0 / 3.0 + k * eps;
    if (e > beta + 1e-12) break;
    push(ladder.r, dyadic_closest(std::pow(R, e)));
  }
  push(ladder.r, dyadic_closest(std::pow(R, beta)));
  const double log8R = std::log2(R) / 3.0;
  for (int k = 0;; ++k) {
    const double e = k * eps;
    if (e > 1.0 + 1e-12) break;
    push(ladder.Rk, std::exp2(3.0 * std::round(e * log8R)));
  }
  push(ladder.Rk, std::exp2(3.0 * std::round(log8R)));
  return ladder;
}

void GeometryReport::merge(const GeometryReport& other) {
  samples += other.samples;
  attempts += other.attempts;
  if (!first_violation && other.first_violation) first_violation = other.first_violation;
  violations += other.violations;
  max_multiplicity = std::max(max_multiplicity, other.max_multiplicity);
  threshold = std::max(threshold, other.threshold);
  max_residual = std::max(max_residual, other.max_residual);
  inverse_residual = std::max(inverse_residual, other.inverse_residual);
  partition_count = std::max(partition_count, other.partition_count);
  partition_bound = std::max(partition_bound, other.partition_bound);
  if (detail.empty()) detail = other.detail;
}

// ---------------------------------------------------------------- checks

GeometryReport check_overlap_geo1(double r_k, double r_next, double R, double c_eps,
                                  std::uint64_t samples, std::uint64_t seed,
                                  double threshold_override) {
  const auto probe = gamma_tilde(r_k, r_next, R, 0, c_eps);
  (void)probe;
  require(std::isfinite(threshold_override) && threshold_override >= 0.0,
          "threshold must be >= 0");
  const std::int64_t count = ceil_count(r_k);
  const double threshold =
      threshold_override > 0.0 ? threshold_override : 4.0 * c_eps * r_next / r_k;
  auto rep = run_chunked("geo1", samples, seed, [&](Rng& g, GeometryReport& out,
                                                    std::uint64_t n) {
    for (std::uint64_t i = 0; i < n; ++i) {
      const auto l = static_cast<std::int64_t>(uniform_below(g, static_cast<std::uint64_t>(count)));
      const auto box = gamma_tilde(r_k, r_next, R, l, c_eps);
      const double A = random_sign(g) * uniform(g, box.a_min, box.a_max);
      const double B = uniform(g, -box.b_max, box.b_max);
      const double C = uniform(g, -box.c_max, box.c_max);
      const Vec3 v = box.point(A, B, C);
      ++out.samples;
      ++out.attempts;
      // |B'| <= b_max at t' = l'/r_k confines l' to an interval.
      const double mid = v[1] / (2.0 * A);
      const double half = box.b_max * kContainmentSlack / std::abs(A);
      const auto lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor((mid - half) * r_k)) - 1);
      const auto hi =
          std::min<std::int64_t>(count - 1, static_cast<std::int64_t>(std::ceil((mid + half) * r_k)) + 1);
      double mult = 0.0;
      bool self = false;
      for (std::int64_t lp = lo; lp <= hi; ++lp) {
        if (!gamma_tilde(r_k, r_next, R, lp, c_eps).contains(v)) continue;
        mult += 1.0;
        if (lp == l) self = true;
        if (static_cast<double>(std::abs(lp - l)) > threshold * (1.0 + 1e-9)) {
          record_violation(out, v);
        }
      }
      if (!self) record_violation(out, v);
      out.max_multiplicity = std::max(out.max_multiplicity, mult);
    }
  });
  rep.threshold = threshold;
  return rep;
}

namespace {

struct Geo2Widths {
  double w_ang;
  double w_norm;
};

Geo2Widths geo2_widths(int case_id, double r_k, double r_next, double R, double c_eps, double r) {
  if (case_id == 1) {
    const double w = dyadic_closest(c_eps * r / R);
    return {w, w};
  }
  const double beta1 = std::log(r_k) / std::log(R / r_k);
  const double w_ang = dyadic_ceil(c_eps * (r_next / r_k) / r_k);
  return {w_ang, std::pow(w_ang, 1.0 / beta1)};
}

GeometryReport geo2_single(int case_id, double r_k, double r_next, double R, double c_eps,
                           double r, std::uint64_t samples, std::uint64_t seed) {
  const auto widths = geo2_widths(case_id, r_k, r_next, R, c_eps, r);
  const ConePartition part{widths.w_ang, widths.w_norm, 4.0};
  const auto T = cone_map_T();
  const std::int64_t count = ceil_count(r_k);
  const double slab_lo = 0.5 / r, slab_hi = 1.0 / r;
  // The third T-coordinate is lambda(t) A + (t B + C) / sqrt 2, lambda(t) <= 3 / (2 sqrt 2).
  const auto probe = gamma_tilde(r_k, r_next, R, 0, c_eps);
  const double reach = 1.5 / kSqrt2 * probe.a_max + (probe.b_max + probe.c_max) / kSqrt2;
  if (slab_lo > reach * (1.0 + 1e-12)) {
    GeometryReport empty;
    empty.check = "geo2";
    empty.detail = "empty slab";
    return empty;
  }
  auto rep = run_chunked("geo2", samples, seed, [&](Rng& g, GeometryReport& out,
                                                    std::uint64_t n) {
    std::uint64_t got = 0;
    const std::uint64_t limit = n * kAttemptFactor;
    while (got < n) {
      if (out.attempts >= limit) {
        throw BudgetExceeded("geo2 sampling found too few slab points",
                             static_cast<double>(out.attempts), static_cast<double>(limit));
      }
      ++out.attempts;
      const auto l = static_cast<std::int64_t>(uniform_below(g, static_cast<std::uint64_t>(count)));
      const auto box = gamma_tilde(r_k, r_next, R, l, c_eps);
      const double t = box.t0;
      const double B = uniform(g, -box.b_max, box.b_max);
      const double C = uniform(g, -box.c_max, box.c_max);
      // Pick A so the third T-coordinate lands on a uniform target in the
      // reachable part of the slab, for a random sign of A.
      const double lambda = (1.0 + 0.5 * t * t) / kSqrt2;
      const double off = (t * B + C) / kSqrt2;
      const double sign = random_sign(g);
      const double e_lo = off + lambda * (sign > 0 ? box.a_min : -box.a_max);
      const double e_hi = off + lambda * (sign > 0 ? box.a_max : -box.a_min);
      const double lo = std::max(e_lo, slab_lo), hi = std::min(e_hi, slab_hi);
      if (lo > hi) continue;
      const double A = (uniform(g, lo, hi) - off) / lambda;
      if (std::abs(A) < box.a_min / kContainmentSlack || std::abs(A) > box.a_max * kContainmentSlack) {
        continue;
      }
      const Vec3 eta = T.apply(box.point(A, B, C));
      if (eta[2] < slab_lo / kContainmentSlack || eta[2] > slab_hi * kContainmentSlack) continue;
      ++got;
      ++out.samples;
      const Vec3 p = r * eta;
      if (!part.contains(part.sector_of(cone_angle(t)), p)) record_violation(out, p);
    }
  });
  rep.partition_count = occupied_sectors(part, count, r_k);
  rep.partition_bound = spanned_sectors(part);
  if (rep.partition_count > rep.partition_bound) ++rep.violations;
  return rep;
}

}  // namespace

GeometryReport check_cone_containment_geo2(int case_id, double r_k, double r_next, double R,
                                           double c_eps, double r, std::uint64_t samples,
                                           std::uint64_t seed) {
  require(case_id == 1 || case_id == 2, "geo2 case must be 1 or 2");
  gamma_tilde(r_k, r_next, R, 0, c_eps);
  require(r_k >= std::cbrt(R) * (1.0 - 1e-9), "r_k must be >= R^(1/3)");
  if (case_id == 1) {
    require(r_k * r_k >= R * (1.0 - 1e-12), "case 1 needs r_k^-1 <= R^-1/2");
  } else {
    require(r_k * r_k <= R * (1.0 + 1e-12), "case 2 needs r_k^-1 >= R^-1/2");
    require(R > r_k, "case 2 needs R > r_k");
  }
  const double r_lo = r_k / (20.0 * c_eps), r_hi = r_next;
  std::vector<double> rs;
  if (r == 0.0) {
    rs = dyadics_between(r_lo, r_hi);
  } else {
    require(std::exp2(std::round(std::log2(r))) == r, "r must be a power of two");
    require(r >= r_lo * (1.0 - 1e-12) && r <= r_hi * (1.0 + 1e-12),
            "r^-1 must lie in [r_next^-1, 20 C r_k^-1]");
    rs = {r};
  }
  require(!rs.empty(), "no dyadic r in range");
  GeometryReport total;
  total.check = "geo2";
  for (std::size_t i = 0; i < rs.size(); ++i) {
    total.merge(geo2_single(case_id, r_k, r_next, R, c_eps, rs[i], samples, mix_seed(seed, i)));
  }
  total.detail = "case " + std::to_string(case_id) + ", " + std::to_string(rs.size()) + " dyadic r";
  return total;
}

namespace {

GeometryReport geo3_single(double R_k, double R_next, double r, double c_eps,
                           std::uint64_t samples, std::uint64_t seed) {
  const double S = snap_integer(std::cbrt(R_k));
  const std::int64_t count = ceil_count(S);
  const double w = c_eps * r / (S * S);
  const ConePartition part{w, w * w, 4.0};
  const auto T = cone_map_T();
  const double ball = 1.0 / std::cbrt(R_next);
  const double slab_lo = 0.5 / r, slab_hi = 1.0 / r;
  const double psi_max = 1.0 / (S * S), phi_max = 1.0 / (S * S * S);
  auto rep = run_chunked("geo3", samples, seed, [&](Rng& g, GeometryReport& out,
                                                    std::uint64_t n) {
    std::uint64_t got = 0;
    const std::uint64_t limit = n * kAttemptFactor;
    auto block_point = [&](double lo) {
      const double s = std::min(lo + uniform01(g) / S, 1.0);
      return point_with_defects(s, uniform(g, -psi_max, psi_max), uniform(g, -phi_max, phi_max));
    };
    while (got < n) {
      if (out.attempts >= limit) {
        throw BudgetExceeded("geo3 sampling found too few slab points",
                             static_cast<double>(out.attempts), static_cast<double>(limit));
      }
      ++out.attempts;
      const auto l = static_cast<std::int64_t>(uniform_below(g, static_cast<std::uint64_t>(count)));
      const double lo = static_cast<double>(l) / S;
      Vec3 d = c_eps * (block_point(lo) - block_point(lo));
      if (d.norm() < ball) continue;
      Vec3 eta = T.apply(d);
      if (eta[2] < 0.0) eta = -eta;
      if (eta[2] < slab_lo || eta[2] > slab_hi) continue;
      ++got;
      ++out.samples;
      const Vec3 p = r * eta;
      if (!part.contains(part.sector_of(cone_angle(lo)), p)) record_violation(out, p);
    }
  });
  rep.partition_count = occupied_sectors(part, count, S);
  rep.partition_bound = spanned_sectors(part);
  if (rep.partition_count > rep.partition_bound) ++rep.violations;
  return rep;
}

}  // namespace

GeometryReport check_cone_containment_geo3(double R_k, double R_next, double r, double c_eps,
                                           std::uint64_t samples, std::uint64_t seed) {
  require(std::isfinite(R_k) && R_k >= 8.0, "R_k must be >= 8");
  require(std::isfinite(R_next) && R_next >= R_k, "R_next must be >= R_k");
  require(std::isfinite(c_eps) && c_eps > 0.0, "C_eps must be positive");
  const double S = snap_integer(std::cbrt(R_k));
  const double r_lo = S / c_eps, r_hi = snap_integer(std::cbrt(R_next));
  std::vector<double> rs;
  if (r == 0.0) {
    rs = dyadics_between(r_lo, r_hi);
  } else {
    require(std::exp2(std::round(std::log2(r))) == r, "r must be a power of two");
    require(r >= r_lo * (1.0 - 1e-12) && r <= r_hi * (1.0 + 1e-12),
            "r^-1 must lie in [R_next^-1/3, C R_k^-1/3]");
    rs = {r};
  }
  require(!rs.empty(), "no dyadic r in range");
  GeometryReport total;
  total.check = "geo3";
  for (std::size_t i = 0; i < rs.size(); ++i) {
    total.merge(geo3_single(R_k, R_next, rs[i], c_eps, samples, mix_seed(seed, i)));
  }
  total.detail = std::to_string(rs.size()) + " dyadic r";
  return total;
}

GeometryReport check_cap_partition(const DecouplingParams& params, std::uint64_t samples,
                                   std::uint64_t seed) {
  params.validate();
  const double psi_max = std::pow(params.R, -2.0 * params.beta);
  const double phi_max = 1.0 / params.R;
  const std::int64_t count = params.cap_count();
  return run_chunked("partition", samples, seed, [&](Rng& g, GeometryReport& out,
                                                     std::uint64_t n) {
    std::uint64_t got = 0;
    while (got < n) {
      ++out.attempts;
      const Vec3 v = point_with_defects(uniform01(g), uniform(g, -psi_max, psi_max),
                                        uniform(g, -phi_max, phi_max));
      const Point3 xi = to_point(v);
      // Rounding can push a sample across the boundary; those are not members.
      if (!neighborhood_membership(params, xi)) continue;
      ++got;
      ++out.samples;
      const auto l = cap_index_of(params, xi);
      if (!l) {
        record_violation(out, v);
        continue;
      }
      int hits = 0;
      for (std::int64_t c = std::max<std::int64_t>(0, *l - 1);
           c <= std::min<std::int64_t>(count - 1, *l + 1); ++c) {
        if (SmallCap{params, c}.contains(xi)) ++hits;
      }
      if (hits != 1 || !SmallCap{params, *l}.contains(xi)) record_violation(out, v);
      out.max_multiplicity = std::max(out.max_multiplicity, static_cast<double>(hits));
    }
  });
}

GeometryReport check_rescale(double R_prev, std::int64_t l, const DecouplingParams& params,
                             std::uint64_t samples, std::uint64_t seed) {
  params.validate();
  const auto L = rescale_map_L(R_prev, l);
  const auto Linv = L.inverse();
  const double a = snap_integer(std::cbrt(R_prev));
  const double S_src = params.cap_scale();
  const double psi_max = std::min(1.0 / (a * a), 1.0 / (S_src * S_src));
  const double phi_max = std::min(1.0 / (a * a * a), 1.0 / params.R);
  const double S_dst = S_src / a;
  const double R_dst = params.R / R_prev;
  const double lo = static_cast<double>(l) / a;
  return run_chunked("rescale", samples, seed, [&](Rng& g, GeometryReport& out,
                                                   std::uint64_t n) {
    for (std::uint64_t i = 0; i < n; ++i) {
      ++out.samples;
      ++out.attempts;
      const double t = uniform01(g);
      const Vec3 curve = L.apply(moment_curve(lo + t / a)) - moment_curve(t);
      out.max_residual = std::max(out.max_residual, curve.cwiseAbs().maxCoeff());
      if (curve.cwiseAbs().maxCoeff() > 1e-9) record_violation(out, moment_curve(t));

      const Vec3 y(uniform01(g), uniform01(g), uniform01(g));
      const Vec3 pre = Linv.apply(y);
      const double back = (L.apply(pre) - y).cwiseAbs().maxCoeff();
      out.inverse_residual = std::max(out.inverse_residual, back);
      const double roundoff =
          64.0 * std::numeric_limits<double>::epsilon() *
          (L.matrix.cwiseAbs().rowwise().sum().maxCoeff() * pre.cwiseAbs().maxCoeff() +
           L.offset.cwiseAbs().maxCoeff() + 1.0);
      if (back > roundoff) record_violation(out, y);

      const double xi1 = std::min(lo + uniform01(g) / a, 1.0);
      const Vec3 x = point_with_defects(xi1, uniform(g, -psi_max, psi_max),
                                        uniform(g, -phi_max, phi_max));
      const Vec3 m = L.apply(x);
      const auto tol = mapped_defect_tolerance(L, x, m);
      const auto d = defects(to_point(m));
      const bool ok = m[0] >= -tol.psi && m[0] <= 1.0 + 1e-12 &&
                      std::abs(d.psi) <= kContainmentSlack / (S_dst * S_dst) + tol.psi &&
                      std::abs(d.phi) <= kContainmentSlack / R_dst + tol.phi;
      if (!ok) record_violation(out, x);
    }
  });
}

GeometryReport check_cap_comparability(double r_k, double R, std::int64_t l,
                                       std::uint64_t samples, std::uint64_t seed) {
  require(std::isfinite(r_k) && r_k >= 1.0, "r_k must be >= 1");
  require(std::isfinite(R) && R >= r_k, "R must be >= r_k");
  require(l >= 0 && static_cast<double>(l) < r_k, "l must lie in [0, r_k)");
  const double t0 = static_cast<double>(l) / r_k;
  const double h = 1.0 / r_k;
  const double psi_max = h * h, phi_max = 1.0 / R;
  // Centroid of the cap: defects average out, leaving the moments of xi1.
  const double m1 = t0 + h / 2.0;
  const double m2 = ((t0 + h) * (t0 + h) * (t0 + h) - t0 * t0 * t0) / (3.0 * h);
  const double m3 = (std::pow(t0 + h, 4) - std::pow(t0, 4)) / (4.0 * h);
  const Vec3 center(m1, m2, m3);
  const Vec3 base = moment_curve(t0);
  const ParamBox under{t0, 0.0, h, h * h, 1.0 / R};
  auto in_under = [&](const Vec3& v) {
    const Vec3 c = frame_coords(t0, v - base);
    return c[0] >= -1e-15 && c[0] <= h * kContainmentSlack &&
           within(c[1], under.b_max, kContainmentSlack) &&
           within(c[2], under.c_max, kContainmentSlack);
  };
  auto in_cap = [&](const Vec3& v) {
    if (!(v[0] >= t0 && v[0] <= t0 + h)) return false;
    const auto d = defects(to_point(v));
    return within(d.psi, psi_max, kContainmentSlack) && within(d.phi, phi_max, kContainmentSlack);
  };
  return run_chunked("comparability", samples, seed, [&](Rng& g, GeometryReport& out,
                                                         std::uint64_t n) {
    for (std::uint64_t i = 0; i < n; ++i) {
      ++out.samples;
      ++out.attempts;
      // Cap point, contracted by 20 about the centroid, lies in the frame box.
      const Vec3 x = point_with_defects(t0 + h * uniform01(g), uniform(g, -psi_max, psi_max),
                                        uniform(g, -phi_max, phi_max));
      if (!in_under(center + (x - center) / 20.0)) record_violation(out, x);
      // Frame box point, contracted by 20 about the centroid, lies in the cap.
      const Vec3 y = base + under.point(h * uniform01(g), uniform(g, -h * h, h * h),
                                        uniform(g, -1.0 / R, 1.0 / R));
      if (!in_cap(center + (y - center) / 20.0)) record_violation(out, y);
    }
  });
}

}  // namespace smallcap
