// AVX2+FMA backend for the Gaussian Gram sums. Compiled with -mavx2 -mfma;
// only reached when cpuid reports both (see simd_dispatch.cpp).

#include "qcd/simd.hpp"

#if defined(QCD_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>

namespace qcd::simd {

namespace {

// exp(x) for 4 doubles: Cephes-style range reduction x = n*ln2 + r followed
// by a rational approximation of exp(r) on |r| <= ln2/2, then scaling by 2^n
// through direct exponent-field construction. Inputs below -708 flush to 0,
// inputs above 709 saturate at exp(709); the Gram kernels only pass
// non-positive arguments.
inline __m256d exp_pd(__m256d x) {
    const __m256d lo = _mm256_set1_pd(-708.0);
    const __m256d hi = _mm256_set1_pd(709.0);
    const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
    x = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

    const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
    const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
    const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);

    __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
    r = _mm256_fnmadd_pd(n, ln2_lo, r);

    const __m256d p0 = _mm256_set1_pd(1.26177193074810590878e-4);
    const __m256d p1 = _mm256_set1_pd(3.02994407707441961300e-2);
    const __m256d p2 = _mm256_set1_pd(9.99999999999999999910e-1);
    const __m256d q0 = _mm256_set1_pd(3.00198505138664455042e-6);
    const __m256d q1 = _mm256_set1_pd(2.52448340349684104192e-3);
    const __m256d q2 = _mm256_set1_pd(2.27265548208155028766e-1);
    const __m256d q3 = _mm256_set1_pd(2.00000000000000000005e0);

    const __m256d rr = _mm256_mul_pd(r, r);
    __m256d p = _mm256_fmadd_pd(p0, rr, p1);
    p = _mm256_fmadd_pd(p, rr, p2);
    p = _mm256_mul_pd(p, r);
    __m256d q = _mm256_fmadd_pd(q0, rr, q1);
    q = _mm256_fmadd_pd(q, rr, q2);
    q = _mm256_fmadd_pd(q, rr, q3);
    // exp(r) = 1 + 2p/(q - p)
    const __m256d e = _mm256_div_pd(p, _mm256_sub_pd(q, p));
    __m256d expr = _mm256_fmadd_pd(_mm256_set1_pd(2.0), e, _mm256_set1_pd(1.0));

    // 2^n: shove the biased integer exponent into the exponent field. n is
    // integral and |n| <= 1024, so n + (1023 + 2^52) places n+1023 in the
    // low mantissa bits.
    const __m256d bias_magic = _mm256_set1_pd(4503599627370496.0 + 1023.0);
    const __m256i bits = _mm256_castpd_si256(_mm256_add_pd(n, bias_magic));
    const __m256d pow2n = _mm256_castsi256_pd(_mm256_slli_epi64(bits, 52));

    expr = _mm256_mul_pd(expr, pow2n);
    return _mm256_andnot_pd(underflow, expr);
}

}  // namespace

void exp4_avx2(const double in[4], double out[4]) {
    _mm256_storeu_pd(out, exp_pd(_mm256_loadu_pd(in)));
}

double gram_sum_soa_avx2(double beta, const double* a0, const double* a1,
                         std::size_t na, const double* b0, const double* b1,
                         std::size_t nb) {
    const __m256d neg_beta = _mm256_set1_pd(-beta);
    __m256d acc = _mm256_setzero_pd();
    double tail = 0.0;
    const std::size_t nb4 = nb & ~std::size_t{3};
    for (std::size_t i = 0; i < na; ++i) {
        const __m256d x0 = _mm256_set1_pd(a0[i]);
        const __m256d x1 = _mm256_set1_pd(a1[i]);
        std::size_t j = 0;
        for (; j < nb4; j += 4) {
            const __m256d d0 = _mm256_sub_pd(x0, _mm256_loadu_pd(b0 + j));
            const __m256d d1 = _mm256_sub_pd(x1, _mm256_loadu_pd(b1 + j));
            const __m256d dist = _mm256_fmadd_pd(d1, d1, _mm256_mul_pd(d0, d0));
            acc = _mm256_add_pd(acc, exp_pd(_mm256_mul_pd(neg_beta, dist)));
        }
        for (; j < nb; ++j) {
            const double d0 = a0[i] - b0[j];
            const double d1 = a1[i] - b1[j];
            tail += std::exp(-beta * (d0 * d0 + d1 * d1));
        }
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    return lanes[0] + lanes[1] + lanes[2] + lanes[3] + tail;
}

}  // namespace qcd::simd

#endif  // QCD_HAVE_AVX2
