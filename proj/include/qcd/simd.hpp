#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

// Runtime-dispatched inner loops for the Gaussian Gram sums that dominate
// detector cost. The scalar path is the reference implementation; vector
// backends must agree with it to ~1e-12 relative (equivalence-tested).

namespace qcd::simd {

enum class Backend { scalar, avx2 };

/// Backend currently selected by dispatch (after any force_backend override).
Backend active_backend();

std::string_view backend_name(Backend b);

/// Test/CLI hook: pin the backend, or pass nullopt to restore auto-detection.
/// Forcing an unsupported backend throws.
void force_backend(std::optional<Backend> b);

bool cpu_supports_avx2();

/// sum_{i<na, j<nb} exp(-beta * ((a0[i]-b0[j])^2 + (a1[i]-b1[j])^2))
/// over coordinate-split pair sequences. Dispatches to the active backend.
double gram_sum_soa(double beta, const double* a0, const double* a1, std::size_t na,
                    const double* b0, const double* b1, std::size_t nb);

/// Reference implementation (plain loops over std::exp).
double gram_sum_soa_scalar(double beta, const double* a0, const double* a1,
                           std::size_t na, const double* b0, const double* b1,
                           std::size_t nb);

#if defined(QCD_HAVE_AVX2)
double gram_sum_soa_avx2(double beta, const double* a0, const double* a1,
                         std::size_t na, const double* b0, const double* b1,
                         std::size_t nb);

/// Vectorized exp on 4 doubles, exposed for equivalence tests.
void exp4_avx2(const double in[4], double out[4]);
#endif

}  // namespace qcd::simd
