#pragma once

// Frequency-space geometry of the moment curve gamma(t) = (t, t^2, t^3):
// anisotropic neighborhoods, small caps, canonical blocks, the frame boxes
// spanned by gamma', gamma'', gamma''', the cone map T and the rescaling map L,
// plus sampled checks of the overlap and containment statements built on them.

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "smallcap/expsum.hpp"

namespace smallcap {

using Vec3 = Eigen::Vector3d;

inline Vec3 to_vec(const Point3& p) { return {p.x1, p.x2, p.x3}; }
inline Point3 to_point(const Vec3& v) { return {v[0], v[1], v[2]}; }

/// Multiplicative slack applied to every bound in sampled containment checks.
inline constexpr double kContainmentSlack = 1.0 + 1e-9;

struct DecouplingParams {
  double R = 2.0;
  double beta = 0.5;

  /// Throws ValidationError unless R >= 2 and beta in [1/3, 1].
  void validate() const;
  /// R^beta, snapped to the nearest integer when within 1e-9 of it.
  double cap_scale() const;
  /// Number of caps, ceil(R^beta).
  std::int64_t cap_count() const;
  /// Cap dimensions R^-beta x R^-2beta x R^-1.
  std::array<double, 3> cap_dims() const;
  /// True when the spatial scale R^max(2 beta, 1) is set by 2 beta, i.e. beta >= 1/2.
  bool spatial_regime_2beta() const { return beta >= 0.5; }
  double spatial_scale() const;
};

/// psi = xi2 - xi1^2 and phi = xi3 - 3 xi1 xi2 + 2 xi1^3; both vanish on the curve.
struct Defects {
  double psi = 0.0;
  double phi = 0.0;
};

Defects defects(const Point3& xi);

/// xi1 in [0,1], |psi| <= S^-2, |phi| <= R^-1: the set M^3(S, R).
bool in_neighborhood(const Point3& xi, double S, double R);

/// Membership in M^3(R^beta, R).
bool neighborhood_membership(const DecouplingParams& params, const Point3& xi);

/// floor(xi1 R^beta) for members (the last cap absorbs xi1 = 1), nullopt otherwise.
std::optional<std::int64_t> cap_index_of(const DecouplingParams& params, const Point3& xi);

struct SmallCap {
  DecouplingParams params;
  std::int64_t l = 0;

  bool contains(const Point3& xi) const;
};

/// Canonical block at scale S: widths S^-1, S^-2, S^-3.
struct CanonicalBlock {
  double S = 2.0;
  std::int64_t l = 0;

  bool contains(const Point3& xi) const;
};

Vec3 moment_curve(double t);

/// gamma'(t), gamma''(t), gamma'''(t).
std::array<Vec3, 3> frenet_frame(double t);

/// Coefficients (A, B, C) with v = A gamma'(t) + B gamma''(t) + C gamma'''(t).
/// The frame is triangular, so this is a back substitution.
Vec3 frame_coords(double t, const Vec3& v);

/// {A gamma'(t0) + B gamma''(t0) + C gamma'''(t0)} with
/// a_min <= |A| <= a_max, |B| <= b_max, |C| <= c_max.
struct ParamBox {
  double t0 = 0.0;
  double a_min = 0.0;
  double a_max = 0.0;
  double b_max = 0.0;
  double c_max = 0.0;

  Vec3 point(double A, double B, double C) const;
  bool contains(const Vec3& v, double slack = kContainmentSlack) const;
};

/// The frame box at t0 = l / r_k with r_next^-1 / 2 <= |A| <= C r_k^-1,
/// |B| <= C r_k^-2, |C| <= C R^-1. Throws ValidationError on bad scales.
ParamBox gamma_tilde(double r_k, double r_next, double R, std::int64_t l, double c_eps);

struct AffineMap3 {
  Eigen::Matrix3d matrix = Eigen::Matrix3d::Identity();
  Vec3 offset = Vec3::Zero();

  Vec3 apply(const Vec3& v) const { return matrix * v + offset; }
  Point3 apply(const Point3& p) const { return to_point(apply(to_vec(p))); }
  double determinant() const { return matrix.determinant(); }
  /// Throws ValidationError when |det| < 1e-12.
  AffineMap3 inverse() const;
  /// (this o other)(v) = this(other(v)).
  AffineMap3 compose(const AffineMap3& other) const;
};

/// T(x, y, z) = (y / 2, (x - z/6) / sqrt 2, (x + z/6) / sqrt 2).
AffineMap3 cone_map_T();

/// The map carrying the l-th canonical block at scale R_prev^(1/3) onto the
/// full curve neighborhood: L(gamma(l a^-1 + a^-1 t)) = gamma(t), a = R_prev^(1/3).
AffineMap3 rescale_map_L(double R_prev, std::int64_t l);

/// Orthogonal light-cone frame at angle omega: e1 = (cos, sin, 1) spans the
/// ray, e2 = (sin, -cos, 0) is angular, e3 = (cos, sin, -1) is normal.
struct ConeFrame {
  double omega = 0.0;

  /// (a, b, c) with v = a e1 + b e2 + c e3.
  Vec3 coords(const Vec3& v) const;
};

/// Angle of T(gamma'(t)) around the cone axis:
/// (cos, sin) = (2 sqrt2 t, 2 - t^2) / (2 + t^2). Decreasing on [0, 1].
double cone_angle(double t);

/// Conical caps over angular sectors [j w_ang, (j + 1) w_ang), tested in the
/// frame at the sector center: a in [1/2 - K w_norm, 1 + K w_norm],
/// |b| <= K w_ang, |c| <= K w_norm.
struct ConePartition {
  double w_ang = 1.0;
  double w_norm = 1.0;
  double K = 4.0;

  std::int64_t sector_of(double omega) const;
  double sector_center(std::int64_t j) const;
  bool contains(std::int64_t sector, const Vec3& p, double slack = kContainmentSlack) const;
};

/// Powers of two (r_k, closest to R^(1/3 + k eps), up to R^beta) and powers
/// of eight (R_k, closest to R^(k eps), up to R). Repeated values are dropped.
struct ScaleLadder {
  std::vector<double> r;
  std::vector<double> Rk;

  static ScaleLadder build(double R, double beta, double eps);
};

/// Power of two closest to x in log scale.
double dyadic_closest(double x);
/// Smallest power of two >= x.
double dyadic_ceil(double x);

struct GeometryReport {
  std::string check;
  std::uint64_t samples = 0;
  std::uint64_t attempts = 0;
  std::uint64_t violations = 0;
  double max_multiplicity = 0.0;
  double threshold = 0.0;
  double max_residual = 0.0;
  double inverse_residual = 0.0;
  std::uint64_t partition_count = 0;
  std::uint64_t partition_bound = 0;
  std::optional<Vec3> first_violation;
  std::string detail;

  void merge(const GeometryReport& other);
};

/// Samples points of the frame boxes for random (l, l') pairs and counts box
/// memberships. Violation: a point of the l-box inside an l'-box with
/// |l - l'| > threshold, by default 4 C r_next / r_k.
GeometryReport check_overlap_geo1(double r_k, double r_next, double R, double c_eps,
                                  std::uint64_t samples, std::uint64_t seed,
                                  double threshold_override = 0.0);

/// Samples r [T(frame box) within {r^-1/2 <= xi3 <= r^-1}] and checks the cap
/// of the sector containing omega(l). Case 1 needs r_k^2 >= R, case 2 r_k^2 <= R.
/// r = 0 runs every dyadic r with r^-1 in [r_next^-1, 20 C r_k^-1].
GeometryReport check_cone_containment_geo2(int case_id, double r_k, double r_next, double R,
                                           double c_eps, double r, std::uint64_t samples,
                                           std::uint64_t seed);

/// Same for differences C (p - q) of points in canonical blocks at scale
/// R_k^(1/3), outside the ball of radius R_next^-1/3, against cone blocks
/// 1 x C r R_k^-2/3 x (C r R_k^-2/3)^2. r = 0 runs every dyadic r in range.
GeometryReport check_cone_containment_geo3(double R_k, double R_next, double r, double c_eps,
                                           std::uint64_t samples, std::uint64_t seed);

/// Random members of M^3(R^beta, R) must satisfy exactly one cap's xi1 condition.
GeometryReport check_cap_partition(const DecouplingParams& params, std::uint64_t samples,
                                   std::uint64_t seed);

/// Curve identity, L o L^-1 = id, and the image of block members at (R, beta)
/// landing in M^3(R_prev^-1/3 R^beta, R_prev^-1 R).
GeometryReport check_rescale(double R_prev, std::int64_t l, const DecouplingParams& params,
                             std::uint64_t samples, std::uint64_t seed);

/// 1/20 dilate of the frame box inside the cap and the cap inside the 20 dilate,
/// dilations about the cap centroid.
GeometryReport check_cap_comparability(double r_k, double R, std::int64_t l,
                                       std::uint64_t samples, std::uint64_t seed);

}  // namespace smallcap
