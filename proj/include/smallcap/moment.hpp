#pragma once

// Exact moments  int_{[0,1]^2 x H} |S(x)|^{2s} dx  for integer s.
//
// Expanding |S|^{2s} = S^s conj(S)^s, the x1 and x2 integrals over full
// periods force sum k_i = sum k'_i and sum k_i^2 = sum k'_i^2, so the moment
// is a weighted count over the Vinogradov-type system, with the remaining x3
// integral over H contributing the kernel  K(d) = int_H e(d x3) dx3.

#include <complex>
#include <cstdint>
#include <map>
#include <string_view>
#include <utility>

#include "smallcap/expsum.hpp"

namespace smallcap {

enum class MomentMethod { exact, brute, quadrature };

std::string_view method_name(MomentMethod m);

struct MomentResult {
  double value = 0.0;
  MomentMethod method = MomentMethod::exact;
  double err_estimate = 0.0;
  double wall_time = 0.0;  // seconds
};

/// Ordered s-tuples, i.e. N^s, allowed before enumeration is refused.
inline constexpr std::uint64_t kDefaultTupleBudget = 200'000'000;
/// Ordered 2s-tuples allowed for the brute-force oracle.
inline constexpr std::uint64_t kDefaultBruteBudget = 100'000'000;

/// int_H e(d x3) dx3 with H = [h0, h0 + N^-sigma].
Complex kernel_H(std::int64_t d, double sigma, double h0, std::int64_t n);

/// Accumulated coefficient products of all s-tuples (k_1..k_s) in [1,N]^s,
/// keyed by (sum k, sum k^2) and then by sum k^3.
struct TupleGroupTable {
  int s = 1;
  std::map<std::pair<std::int64_t, std::int64_t>, std::map<std::int64_t, Complex>> groups;
  std::uint64_t tuple_count = 0;     // ordered tuples represented, N^s
  std::uint64_t multiset_count = 0;  // nondecreasing tuples enumerated

  /// Sum of every accumulated product; equals (sum_k a_k)^s.
  Complex total_mass() const;
  std::size_t entry_count() const;
};

TupleGroupTable build_group_table(const ExpSumSpec& spec, int s,
                                  std::uint64_t max_tuples = kDefaultTupleBudget);

/// Grouped exact moment. The real part is returned; |imaginary residue| goes
/// to err_estimate.
MomentResult moment_exact(const ExpSumSpec& spec, int s,
                          std::uint64_t max_tuples = kDefaultTupleBudget);

/// Number of (k, k') in [1,N]^{2s} solving the degree 1, 2, 3 Vinogradov system.
std::uint64_t vinogradov_count(std::int64_t n, int s,
                               std::uint64_t max_tuples = kDefaultTupleBudget);

/// Ungrouped oracle: direct sum over all ordered pairs of s-tuples.
MomentResult moment_brute(const ExpSumSpec& spec, int s,
                          std::uint64_t max_pairs = kDefaultBruteBudget);

}  // namespace smallcap
