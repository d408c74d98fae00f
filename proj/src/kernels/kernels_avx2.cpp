#include "kernels_impl.hpp"

#include <immintrin.h>

namespace posctl::kernels::detail {

namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    return hsum(_mm256_add_pd(acc0, acc1)) + dot_scalar(a + i, b + i, n - i);
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        // mul + add (not fma) so results match the scalar reference bit for bit
        const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
    }
    axpy_scalar(alpha, x + i, y + i, n - i);
}

void soft_threshold_avx2(const double* y, const double* w, double t, double* out, std::size_t n) {
    const __m256d vt = _mm256_set1_pd(t);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d sign_mask = _mm256_set1_pd(-0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vy = _mm256_loadu_pd(y + i);
        const __m256d mag = _mm256_andnot_pd(sign_mask, vy);
        const __m256d shrunk = _mm256_sub_pd(mag, _mm256_mul_pd(vt, _mm256_loadu_pd(w + i)));
        const __m256d kept = _mm256_max_pd(zero, shrunk);
        const __m256d sign = _mm256_and_pd(sign_mask, vy);
        _mm256_storeu_pd(out + i, _mm256_or_pd(_mm256_andnot_pd(sign_mask, kept), sign));
    }
    soft_threshold_scalar(y + i, w + i, t, out + i, n - i);
}

void soft_threshold_nonneg_avx2(const double* y, const double* w, double t, double* out,
                                std::size_t n) {
    const __m256d vt = _mm256_set1_pd(t);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d shrunk =
            _mm256_sub_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(vt, _mm256_loadu_pd(w + i)));
        // max(zero, x) keeps -0.0 the way std::max(x, 0.0) does
        _mm256_storeu_pd(out + i, _mm256_max_pd(zero, shrunk));
    }
    soft_threshold_nonneg_scalar(y + i, w + i, t, out + i, n - i);
}

double clamped_shift_sum_avx2(const double* y, double shift, double lo, double hi,
                              std::size_t n) {
    const __m256d vs = _mm256_set1_pd(shift);
    const __m256d vlo = _mm256_set1_pd(lo);
    const __m256d vhi = _mm256_set1_pd(hi);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(y + i), vs);
        acc = _mm256_add_pd(acc, _mm256_min_pd(vhi, _mm256_max_pd(vlo, d)));
    }
    return hsum(acc) + clamped_shift_sum_scalar(y + i, shift, lo, hi, n - i);
}

}  // namespace posctl::kernels::detail
