#pragma once

// Vector inner loops shared by the metric and solver code. Every kernel has a
// scalar reference implementation; wider variants are picked at runtime and
// are tested for equivalence against the reference.

#include <cstddef>
#include <span>
#include <string_view>

namespace posctl::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

struct KernelTable {
    Isa isa;
    // sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // y[i] += alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // out[i] = sign(y[i]) * max(|y[i]| - t * w[i], 0)
    void (*soft_threshold)(const double* y, const double* w, double t, double* out, std::size_t n);
    // out[i] = max(y[i] - t * w[i], 0)
    void (*soft_threshold_nonneg)(const double* y, const double* w, double t, double* out,
                                  std::size_t n);
    // sum_i clamp(y[i] - shift, lo, hi)
    double (*clamped_shift_sum)(const double* y, double shift, double lo, double hi,
                                std::size_t n);
};

const KernelTable& scalar_table();

// True when the CPU supports the ISA and the library was built with it.
bool available(Isa isa);

// Table for a specific ISA; falls back to scalar if unavailable.
const KernelTable& table(Isa isa);

// Best available table. POSCTL_ISA=scalar in the environment forces the
// reference path.
const KernelTable& active();

// Overrides the active table for the rest of the process (tests, benchmarks).
void force(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    active().axpy(alpha, x.data(), y.data(), x.size());
}

inline double clamped_shift_sum(std::span<const double> y, double shift, double lo, double hi) {
    return active().clamped_shift_sum(y.data(), shift, lo, hi, y.size());
}

}  // namespace posctl::kernels
