#include "smallcap/moment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "smallcap/error.hpp"
#include "smallcap/parallel.hpp"

namespace smallcap {

std::string_view method_name(MomentMethod m) {
  switch (m) {
    case MomentMethod::exact:
      return "exact";
    case MomentMethod::brute:
      return "brute";
    case MomentMethod::quadrature:
      return "quadrature";
  }
  return "unknown";
}

Complex kernel_H(std::int64_t d, double sigma, double h0, std::int64_t n) {
  const double length = std::pow(static_cast<double>(n), -sigma);
  if (d == 0) return {length, 0.0};
  // A whole number of periods integrates to zero.
  if (sigma == 0.0 || n == 1) return {0.0, 0.0};
  const double dd = static_cast<double>(d);
  const Complex start = unit_phase(dd * h0);
  const Complex jump = unit_phase(dd * length) - 1.0;
  return start * jump / Complex(0.0, 2.0 * std::numbers::pi * dd);
}

Complex TupleGroupTable::total_mass() const {
  Complex total(0.0, 0.0);
  for (const auto& [key, inner] : groups) {
    for (const auto& [p3, c] : inner) total += c;
  }
  return total;
}

std::size_t TupleGroupTable::entry_count() const {
  std::size_t count = 0;
  for (const auto& [key, inner] : groups) count += inner.size();
  return count;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void check_s(int s) {
  if (s < 1) throw ValidationError("s must be >= 1");
  if (s > 20) throw ValidationError("s must be <= 20");
}

double ordered_tuples(std::int64_t n, int s) {
  return std::pow(static_cast<double>(n), static_cast<double>(s));
}

void check_budget(std::int64_t n, int s, std::uint64_t max_tuples) {
  const double tuples = ordered_tuples(n, s);
  if (tuples > static_cast<double>(max_tuples)) {
    throw BudgetExceeded("tuple enumeration exceeds budget", tuples,
                         static_cast<double>(max_tuples));
  }
  // The largest key, s N^3, must fit comfortably in a signed 64-bit integer.
  const double n3 = std::pow(static_cast<double>(n), 3.0);
  if (static_cast<double>(s) * n3 >= 9.2e18) {
    throw ValidationError("s * N^3 overflows 64-bit keys");
  }
}

std::uint64_t factorial(int s) {
  std::uint64_t f = 1;
  for (int i = 2; i <= s; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

// One grouped entry of a p1-slice: (sum k^2, sum k^3) with its weight.
struct SliceEntry {
  std::int64_t p2;
  std::int64_t p3;
  Complex coeff;
  std::uint64_t count;
};

// Enumerates nondecreasing s-tuples with a fixed first power sum p1. Each
// leaf carries the number of ordered tuples it represents (s! / prod r_i!)
// and the product of its coefficients times that multiplicity.
class SliceEnumerator {
 public:
  SliceEnumerator(const ExpSumSpec* spec, std::int64_t n, int s)
      : spec_(spec), n_(n), s_(s), s_factorial_(factorial(s)) {}

  std::vector<SliceEntry> run(std::int64_t p1) {
    entries_.clear();
    recurse(0, 1, p1, 0, 0, Complex(1.0, 0.0), 1, 0, 0);
    std::sort(entries_.begin(), entries_.end(), [](const SliceEntry& a, const SliceEntry& b) {
      return a.p2 != b.p2 ? a.p2 < b.p2 : a.p3 < b.p3;
    });
    std::vector<SliceEntry> merged;
    merged.reserve(entries_.size());
    for (const auto& e : entries_) {
      if (!merged.empty() && merged.back().p2 == e.p2 && merged.back().p3 == e.p3) {
        merged.back().coeff += e.coeff;
        merged.back().count += e.count;
      } else {
        merged.push_back(e);
      }
    }
    return merged;
  }

  std::uint64_t leaves() const { return leaves_; }

 private:
  void recurse(int pos, std::int64_t lo, std::int64_t rem, std::int64_t p2, std::int64_t p3,
               Complex prod, std::uint64_t denom, std::int64_t prev, int run) {
    const int left = s_ - pos;
    if (left == 1) {
      const std::int64_t v = rem;
      if (v < lo || v > n_) return;
      emit(v, p2, p3, prod, denom, prev, run);
      return;
    }
    const std::int64_t vmin = std::max(lo, rem - static_cast<std::int64_t>(left - 1) * n_);
    const std::int64_t vmax = std::min(n_, rem / left);
    for (std::int64_t v = vmin; v <= vmax; ++v) {
      const int next_run = (v == prev) ? run + 1 : 1;
      const std::uint64_t next_denom = denom * static_cast<std::uint64_t>(next_run);
      const Complex next_prod = spec_ != nullptr ? prod * coeff(v) : prod;
      recurse(pos + 1, v, rem - v, p2 + v * v, p3 + v * v * v, next_prod, next_denom, v,
              next_run);
    }
  }

  void emit(std::int64_t v, std::int64_t p2, std::int64_t p3, Complex prod, std::uint64_t denom,
            std::int64_t prev, int run) {
    const int next_run = (v == prev) ? run + 1 : 1;
    denom *= static_cast<std::uint64_t>(next_run);
    const std::uint64_t mult = s_factorial_ / denom;
    if (spec_ != nullptr) prod *= coeff(v);
    ++leaves_;
    entries_.push_back(
        {p2 + v * v, p3 + v * v * v, prod * static_cast<double>(mult), mult});
  }

  Complex coeff(std::int64_t k) const { return spec_->coeffs[static_cast<std::size_t>(k - 1)]; }

  const ExpSumSpec* spec_;
  std::int64_t n_;
  int s_;
  std::uint64_t s_factorial_;
  std::uint64_t leaves_ = 0;
  std::vector<SliceEntry> entries_;
};

// Calls visit(p1, slice) for every p1-slice, slices possibly concurrently.
template <class Visit>
std::uint64_t for_each_slice(const ExpSumSpec* spec, std::int64_t n, int s, Visit&& visit) {
  const std::int64_t p1_min = s;
  const std::int64_t p1_max = static_cast<std::int64_t>(s) * n;
  const std::size_t slices = static_cast<std::size_t>(p1_max - p1_min + 1);
  std::vector<std::uint64_t> leaves(slices, 0);
  parallel_chunks(slices, [&](std::size_t idx) {
    SliceEnumerator e(spec, n, s);
    const std::int64_t p1 = p1_min + static_cast<std::int64_t>(idx);
    auto slice = e.run(p1);
    leaves[idx] = e.leaves();
    visit(idx, p1, slice);
  });
  std::uint64_t total = 0;
  for (auto l : leaves) total += l;
  return total;
}

}  // namespace

TupleGroupTable build_group_table(const ExpSumSpec& spec, int s, std::uint64_t max_tuples) {
  spec.validate();
  check_s(s);
  check_budget(spec.N, s, max_tuples);
  TupleGroupTable table;
  table.s = s;
  table.tuple_count = static_cast<std::uint64_t>(std::llround(ordered_tuples(spec.N, s)));
  const std::size_t slices = static_cast<std::size_t>(s) * static_cast<std::size_t>(spec.N) -
                             static_cast<std::size_t>(s) + 1;
  std::vector<std::vector<SliceEntry>> per_slice(slices);
  std::vector<std::int64_t> p1_of(slices);
  table.multiset_count =
      for_each_slice(&spec, spec.N, s, [&](std::size_t idx, std::int64_t p1, auto& slice) {
        per_slice[idx] = std::move(slice);
        p1_of[idx] = p1;
      });
  for (std::size_t idx = 0; idx < slices; ++idx) {
    for (const auto& e : per_slice[idx]) table.groups[{p1_of[idx], e.p2}][e.p3] += e.coeff;
  }
  return table;
}

namespace {

// sum_{i,j} c_i conj(c_j) K(d_i - d_j) over one (p1, p2) group.
Complex pair_sum(const SliceEntry* first, const SliceEntry* last, const ExpSumSpec& spec,
                 bool kronecker, double length) {
  Complex total(0.0, 0.0);
  if (kronecker) {
    for (const SliceEntry* a = first; a != last; ++a) total += std::norm(a->coeff) * length;
    return total;
  }
  for (const SliceEntry* a = first; a != last; ++a) {
    for (const SliceEntry* b = first; b != last; ++b) {
      total += a->coeff * std::conj(b->coeff) * kernel_H(a->p3 - b->p3, spec.sigma, spec.h0, spec.N);
    }
  }
  return total;
}

}  // namespace

MomentResult moment_exact(const ExpSumSpec& spec, int s, std::uint64_t max_tuples) {
  const auto t0 = Clock::now();
  spec.validate();
  check_s(s);
  check_budget(spec.N, s, max_tuples);
  const bool kronecker = spec.sigma == 0.0 || spec.N == 1;
  const double length = spec.h_length();
  const std::size_t slices = static_cast<std::size_t>(s) * static_cast<std::size_t>(spec.N) -
                             static_cast<std::size_t>(s) + 1;
  std::vector<Complex> partial(slices, Complex(0.0, 0.0));
  for_each_slice(&spec, spec.N, s, [&](std::size_t idx, std::int64_t, auto& slice) {
    Complex acc(0.0, 0.0);
    std::size_t i = 0;
    while (i < slice.size()) {
      std::size_t j = i;
      while (j < slice.size() && slice[j].p2 == slice[i].p2) ++j;
      acc += pair_sum(slice.data() + i, slice.data() + j, spec, kronecker, length);
      i = j;
    }
    partial[idx] = acc;
  });
  Complex total(0.0, 0.0);
  for (const auto& p : partial) total += p;
  MomentResult r;
  r.value = total.real();
  r.method = MomentMethod::exact;
  r.err_estimate = std::abs(total.imag());
  r.wall_time = seconds_since(t0);
  return r;
}

std::uint64_t vinogradov_count(std::int64_t n, int s, std::uint64_t max_tuples) {
  if (n < 1) throw ValidationError("N must be >= 1");
  check_s(s);
  check_budget(n, s, max_tuples);
  const std::size_t slices = static_cast<std::size_t>(s) * static_cast<std::size_t>(n) -
                             static_cast<std::size_t>(s) + 1;
  std::vector<std::uint64_t> partial(slices, 0);
  std::vector<char> overflow(slices, 0);
  for_each_slice(nullptr, n, s, [&](std::size_t idx, std::int64_t, auto& slice) {
    std::uint64_t acc = 0;
    for (const auto& e : slice) {
      std::uint64_t sq = 0;
      if (__builtin_mul_overflow(e.count, e.count, &sq) || __builtin_add_overflow(acc, sq, &acc)) {
        overflow[idx] = 1;
        return;
      }
    }
    partial[idx] = acc;
  });
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < slices; ++i) {
    if (overflow[i] || __builtin_add_overflow(total, partial[i], &total)) {
      throw ValidationError("Vinogradov count overflows 64 bits");
    }
  }
  return total;
}

MomentResult moment_brute(const ExpSumSpec& spec, int s, std::uint64_t max_pairs) {
  const auto t0 = Clock::now();
  spec.validate();
  check_s(s);
  const double pairs = ordered_tuples(spec.N, 2 * s);
  if (pairs > static_cast<double>(max_pairs)) {
    throw BudgetExceeded("brute-force pair enumeration exceeds budget", pairs,
                         static_cast<double>(max_pairs));
  }
  check_budget(spec.N, s, std::numeric_limits<std::uint64_t>::max());

  // Every ordered s-tuple with its power sums and coefficient product.
  struct Tuple {
    std::int64_t p1, p2, p3;
    Complex prod;
  };
  std::vector<Tuple> tuples;
  tuples.reserve(static_cast<std::size_t>(std::llround(ordered_tuples(spec.N, s))));
  std::vector<std::int64_t> k(static_cast<std::size_t>(s), 1);
  while (true) {
    Tuple t{0, 0, 0, Complex(1.0, 0.0)};
    for (auto v : k) {
      t.p1 += v;
      t.p2 += v * v;
      t.p3 += v * v * v;
      t.prod *= spec.coeffs[static_cast<std::size_t>(v - 1)];
    }
    tuples.push_back(t);
    int pos = s - 1;
    while (pos >= 0 && k[static_cast<std::size_t>(pos)] == spec.N) {
      k[static_cast<std::size_t>(pos)] = 1;
      --pos;
    }
    if (pos < 0) break;
    ++k[static_cast<std::size_t>(pos)];
  }

  Complex total(0.0, 0.0);
  for (const auto& a : tuples) {
    for (const auto& b : tuples) {
      if (a.p1 != b.p1 || a.p2 != b.p2) continue;
      total += a.prod * std::conj(b.prod) * kernel_H(a.p3 - b.p3, spec.sigma, spec.h0, spec.N);
    }
  }
  MomentResult r;
  r.value = total.real();
  r.method = MomentMethod::brute;
  r.err_estimate = std::abs(total.imag());
  r.wall_time = seconds_since(t0);
  return r;
}

}  // namespace smallcap
