#pragma once

#include <cstddef>

namespace smallcap::simd::detail {

void phase_sweep_scalar(double*, double*, const double*, const double*, std::size_t, double*,
                        double*, std::size_t);
void complex_mul_scalar(const double*, const double*, const double*, const double*, double*,
                        double*, std::size_t);
double abs_pow_sum_int_scalar(const double*, const double*, std::size_t, unsigned);
double ipow(double base, unsigned e);

#if defined(SMALLCAP_HAVE_AVX2)
void phase_sweep_avx2(double*, double*, const double*, const double*, std::size_t, double*,
                      double*, std::size_t);
void complex_mul_avx2(const double*, const double*, const double*, const double*, double*,
                      double*, std::size_t);
double abs_pow_sum_int_avx2(const double*, const double*, std::size_t, unsigned);
#endif

}  // namespace smallcap::simd::detail
