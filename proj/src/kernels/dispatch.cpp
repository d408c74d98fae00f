#include "posctl/kernels.hpp"

#include "kernels_impl.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace posctl::kernels {

namespace {

constexpr KernelTable kScalar{
    Isa::Scalar,
    detail::dot_scalar,
    detail::axpy_scalar,
    detail::soft_threshold_scalar,
    detail::soft_threshold_nonneg_scalar,
    detail::clamped_shift_sum_scalar,
};

#if defined(POSCTL_HAVE_AVX2_TU)
constexpr KernelTable kAvx2{
    Isa::Avx2,
    detail::dot_avx2,
    detail::axpy_avx2,
    detail::soft_threshold_avx2,
    detail::soft_threshold_nonneg_avx2,
    detail::clamped_shift_sum_avx2,
};
#endif

bool cpu_has_avx2() {
#if defined(POSCTL_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable* pick_default() {
    if (const char* env = std::getenv("POSCTL_ISA"); env && std::string(env) == "scalar") {
        return &kScalar;
    }
    return &table(available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar);
}

std::atomic<const KernelTable*>& current() {
    static std::atomic<const KernelTable*> ptr{pick_default()};
    return ptr;
}

}  // namespace

std::string_view to_string(Isa isa) {
    switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    }
    return "unknown";
}

const KernelTable& scalar_table() { return kScalar; }

bool available(Isa isa) {
    switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2: {
        static const bool has = cpu_has_avx2();
        return has;
    }
    }
    return false;
}

const KernelTable& table(Isa isa) {
#if defined(POSCTL_HAVE_AVX2_TU)
    if (isa == Isa::Avx2 && available(Isa::Avx2)) return kAvx2;
#endif
    (void)isa;
    return kScalar;
}

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

void force(Isa isa) { current().store(&table(isa), std::memory_order_relaxed); }

}  // namespace posctl::kernels
