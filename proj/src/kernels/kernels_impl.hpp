#pragma once

#include <cstddef>

namespace posctl::kernels::detail {

double dot_scalar(const double* a, const double* b, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
void soft_threshold_scalar(const double* y, const double* w, double t, double* out, std::size_t n);
void soft_threshold_nonneg_scalar(const double* y, const double* w, double t, double* out,
                                  std::size_t n);
double clamped_shift_sum_scalar(const double* y, double shift, double lo, double hi, std::size_t n);

#if defined(POSCTL_HAVE_AVX2_TU)
double dot_avx2(const double* a, const double* b, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
void soft_threshold_avx2(const double* y, const double* w, double t, double* out, std::size_t n);
void soft_threshold_nonneg_avx2(const double* y, const double* w, double t, double* out,
                                std::size_t n);
double clamped_shift_sum_avx2(const double* y, double shift, double lo, double hi, std::size_t n);
#endif

}  // namespace posctl::kernels::detail
