#pragma once

// Data-parallel inner loops shared by the grid evaluator and the quadrature
// reductions. Every kernel has a scalar reference implementation; wider
// variants are selected at runtime when the CPU supports them and are tested
// for equivalence against the reference.
//
// Complex arrays are passed in split (re[], im[]) layout.

#include <cstddef>
#include <string_view>

namespace smallcap::simd {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;

  // For j in [0, steps): out[j] = sum_k w[k], then w[k] *= z[k].
  // w is advanced in place by `steps` multiplications.
  void (*phase_sweep)(double* w_re, double* w_im, const double* z_re, const double* z_im,
                      std::size_t terms, double* out_re, double* out_im, std::size_t steps);

  // out[k] = a[k] * b[k]
  void (*complex_mul)(const double* a_re, const double* a_im, const double* b_re,
                      const double* b_im, double* out_re, double* out_im, std::size_t n);

  // sum_j (re_j^2 + im_j^2)^half_power
  double (*abs_pow_sum_int)(const double* re, const double* im, std::size_t n,
                            unsigned half_power);
};

/// Reference table; always available.
const KernelTable& scalar_kernels();

/// Table for `isa`, or nullptr when it is not compiled in or the CPU lacks it.
const KernelTable* kernels_for(Isa isa);

/// Currently selected table. Defaults to the widest supported ISA unless the
/// SMALLCAP_ISA environment variable names another one ("scalar", "avx2").
const KernelTable& kernels();

/// Overrides the runtime selection. Throws ValidationError when unsupported.
void select_isa(Isa isa);

/// sum_j (re_j^2 + im_j^2)^(p/2) for arbitrary real p > 0 (scalar only).
double abs_pow_sum_real(const double* re, const double* im, std::size_t n, double p);

}  // namespace smallcap::simd
