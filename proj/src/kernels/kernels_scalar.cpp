#include "kernels_impl.hpp"

#include <algorithm>
#include <cmath>

namespace posctl::kernels::detail {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void soft_threshold_scalar(const double* y, const double* w, double t, double* out,
                           std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double mag = std::max(std::fabs(y[i]) - t * w[i], 0.0);
        out[i] = std::copysign(mag, y[i]);
    }
}

void soft_threshold_nonneg_scalar(const double* y, const double* w, double t, double* out,
                                  std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::max(y[i] - t * w[i], 0.0);
}

double clamped_shift_sum_scalar(const double* y, double shift, double lo, double hi,
                                std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::clamp(y[i] - shift, lo, hi);
    return s;
}

}  // namespace posctl::kernels::detail
