#include "qcd/simd.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

namespace qcd::simd {

namespace {

std::atomic<int> g_forced{-1};  // -1 = auto

Backend detect() {
#if defined(QCD_HAVE_AVX2)
    if (cpu_supports_avx2()) return Backend::avx2;
#endif
    return Backend::scalar;
}

}  // namespace

bool cpu_supports_avx2() {
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend active_backend() {
    const int forced = g_forced.load(std::memory_order_relaxed);
    if (forced >= 0) return static_cast<Backend>(forced);
    static const Backend detected = detect();
    return detected;
}

std::string_view backend_name(Backend b) {
    switch (b) {
        case Backend::avx2: return "avx2";
        case Backend::scalar: return "scalar";
    }
    return "unknown";
}

void force_backend(std::optional<Backend> b) {
    if (!b) {
        g_forced.store(-1, std::memory_order_relaxed);
        return;
    }
    if (*b == Backend::avx2) {
#if defined(QCD_HAVE_AVX2)
        if (!cpu_supports_avx2())
            throw std::runtime_error("avx2 backend not supported on this cpu");
#else
        throw std::runtime_error("avx2 backend not compiled in");
#endif
    }
    g_forced.store(static_cast<int>(*b), std::memory_order_relaxed);
}

double gram_sum_soa_scalar(double beta, const double* a0, const double* a1,
                           std::size_t na, const double* b0, const double* b1,
                           std::size_t nb) {
    double total = 0.0;
    for (std::size_t i = 0; i < na; ++i) {
        const double x0 = a0[i];
        const double x1 = a1[i];
        double row = 0.0;
        for (std::size_t j = 0; j < nb; ++j) {
            const double d0 = x0 - b0[j];
            const double d1 = x1 - b1[j];
            row += std::exp(-beta * (d0 * d0 + d1 * d1));
        }
        total += row;
    }
    return total;
}

double gram_sum_soa(double beta, const double* a0, const double* a1, std::size_t na,
                    const double* b0, const double* b1, std::size_t nb) {
#if defined(QCD_HAVE_AVX2)
    if (active_backend() == Backend::avx2)
        return gram_sum_soa_avx2(beta, a0, a1, na, b0, b1, nb);
#endif
    return gram_sum_soa_scalar(beta, a0, a1, na, b0, b1, nb);
}

}  // namespace qcd::simd
