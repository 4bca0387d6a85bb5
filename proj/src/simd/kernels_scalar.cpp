#include "kernels_impl.hpp"

#include <cmath>

namespace smallcap::simd::detail {

void phase_sweep_scalar(double* w_re, double* w_im, const double* z_re, const double* z_im,
                        std::size_t terms, double* out_re, double* out_im, std::size_t steps) {
  for (std::size_t j = 0; j < steps; ++j) {
    double sr = 0.0;
    double si = 0.0;
    for (std::size_t k = 0; k < terms; ++k) {
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

void complex_mul_scalar(const double* a_re, const double* a_im, const double* b_re,
                        const double* b_im, double* out_re, double* out_im, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    const double r = a_re[k] * b_re[k] - a_im[k] * b_im[k];
    const double i = a_re[k] * b_im[k] + a_im[k] * b_re[k];
    out_re[k] = r;
    out_im[k] = i;
  }
}

double ipow(double base, unsigned e) {
  double result = 1.0;
  while (e != 0) {
    if (e & 1u) result *= base;
    base *= base;
    e >>= 1u;
  }
  return result;
}

double abs_pow_sum_int_scalar(const double* re, const double* im, std::size_t n,
                              unsigned half_power) {
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) total += ipow(re[j] * re[j] + im[j] * im[j], half_power);
  return total;
}

}  // namespace smallcap::simd::detail

namespace smallcap::simd {

double abs_pow_sum_real(const double* re, const double* im, std::size_t n, double p) {
  const double h = 0.5 * p;
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double m2 = re[j] * re[j] + im[j] * im[j];
    total += m2 > 0.0 ? std::pow(m2, h) : 0.0;
  }
  return total;
}

}  // namespace smallcap::simd
