#pragma once

// Seeded generators whose output is fixed by the standard (mt19937_64 raw
// bits), so sampled experiments reproduce bit-for-bit across platforms. The
// <random> distributions are implementation-defined and are not used.

#include <cstdint>
#include <random>

namespace smallcap {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) built from the top 53 bits.
inline double uniform01(Rng& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& g, double lo, double hi) { return lo + (hi - lo) * uniform01(g); }

/// Uniform integer in [0, n), n >= 1.
inline std::uint64_t uniform_below(Rng& g, std::uint64_t n) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(g()) * n) >> 64);
}

}  // namespace smallcap
