#include <immintrin.h>

#include "kernels_impl.hpp"

namespace smallcap::simd::detail {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline __m256d ipow4(__m256d base, unsigned e) {
  __m256d result = _mm256_set1_pd(1.0);
  while (e != 0) {
    if (e & 1u) result = _mm256_mul_pd(result, base);
    base = _mm256_mul_pd(base, base);
    e >>= 1u;
  }
  return result;
}

}  // namespace

void phase_sweep_avx2(double* w_re, double* w_im, const double* z_re, const double* z_im,
                      std::size_t terms, double* out_re, double* out_im, std::size_t steps) {
  const std::size_t vec_end = terms - terms % 4;
  for (std::size_t j = 0; j < steps; ++j) {
    __m256d acc_r = _mm256_setzero_pd();
    __m256d acc_i = _mm256_setzero_pd();
    for (std::size_t k = 0; k < vec_end; k += 4) {
      const __m256d wr = _mm256_loadu_pd(w_re + k);
      const __m256d wi = _mm256_loadu_pd(w_im + k);
      const __m256d zr = _mm256_loadu_pd(z_re + k);
      const __m256d zi = _mm256_loadu_pd(z_im + k);
      acc_r = _mm256_add_pd(acc_r, wr);
      acc_i = _mm256_add_pd(acc_i, wi);
      _mm256_storeu_pd(w_re + k, _mm256_fmsub_pd(wr, zr, _mm256_mul_pd(wi, zi)));
      _mm256_storeu_pd(w_im + k, _mm256_fmadd_pd(wr, zi, _mm256_mul_pd(wi, zr)));
    }
    double sr = hsum(acc_r);
    double si = hsum(acc_i);
    for (std::size_t k = vec_end; k < terms; ++k) {
      sr += w_re[k];
      si += w_im[k];
      const double nr = w_re[k] * z_re[k] - w_im[k] * z_im[k];
      const double ni = w_re[k] * z_im[k] + w_im[k] * z_re[k];
      w_re[k] = nr;
      w_im[k] = ni;
    }
    out_re[j] = sr;
    out_im[j] = si;
  }
}

void complex_mul_avx2(const double* a_re, const double* a_im, const double* b_re,
                      const double* b_im, double* out_re, double* out_im, std::size_t n) {
  const std::size_t vec_end = n - n % 4;
  for (std::size_t k = 0; k < vec_end; k += 4) {
    const __m256d ar = _mm256_loadu_pd(a_re + k);
    const __m256d ai = _mm256_loadu_pd(a_im + k);
    const __m256d br = _mm256_loadu_pd(b_re + k);
    const __m256d bi = _mm256_loadu_pd(b_im + k);
    _mm256_storeu_pd(out_re + k, _mm256_fmsub_pd(ar, br, _mm256_mul_pd(ai, bi)));
    _mm256_storeu_pd(out_im + k, _mm256_fmadd_pd(ar, bi, _mm256_mul_pd(ai, br)));
  }
  for (std::size_t k = vec_end; k < n; ++k) {
    const double r = a_re[k] * b_re[k] - a_im[k] * b_im[k];
    const double i = a_re[k] * b_im[k] + a_im[k] * b_re[k];
    out_re[k] = r;
    out_im[k] = i;
  }
}

double abs_pow_sum_int_avx2(const double* re, const double* im, std::size_t n,
                            unsigned half_power) {
  const std::size_t vec_end = n - n % 4;
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t j = 0; j < vec_end; j += 4) {
    const __m256d r = _mm256_loadu_pd(re + j);
    const __m256d i = _mm256_loadu_pd(im + j);
    const __m256d m2 = _mm256_fmadd_pd(r, r, _mm256_mul_pd(i, i));
    acc = _mm256_add_pd(acc, ipow4(m2, half_power));
  }
  double total = hsum(acc);
  for (std::size_t j = vec_end; j < n; ++j) total += ipow(re[j] * re[j] + im[j] * im[j], half_power);
  return total;
}

}  // namespace smallcap::simd::detail
