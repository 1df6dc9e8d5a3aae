#include <doctest.h>

#include <cmath>
#include <vector>

#include "qcd/rng.hpp"
#include "qcd/simd.hpp"

using namespace qcd;

TEST_CASE("gram dispatch matches the scalar reference") {
    rng::Xoshiro256pp g(123);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t na = 1 + static_cast<std::size_t>(g.next() % 40);
        const std::size_t nb = 1 + static_cast<std::size_t>(g.next() % 40);
        std::vector<double> a0(na), a1(na), b0(nb), b1(nb);
        for (auto& v : a0) v = 10.0 * g.uniform01() - 5.0;
        for (auto& v : a1) v = 10.0 * g.uniform01() - 5.0;
        for (auto& v : b0) v = 10.0 * g.uniform01() - 5.0;
        for (auto& v : b1) v = 10.0 * g.uniform01() - 5.0;
        const double beta = 0.1 + 3.0 * g.uniform01();

        const double ref =
            simd::gram_sum_soa_scalar(beta, a0.data(), a1.data(), na, b0.data(), b1.data(), nb);
        const double got =
            simd::gram_sum_soa(beta, a0.data(), a1.data(), na, b0.data(), b1.data(), nb);
        CHECK(got == doctest::Approx(ref).epsilon(1e-12));
    }
}

#if defined(QCD_HAVE_AVX2)
TEST_CASE("avx2 exp agrees with std::exp" * doctest::skip(!simd::cpu_supports_avx2())) {
    rng::Xoshiro256pp g(77);
    double in[4], out[4];
    for (int rep = 0; rep < 5000; ++rep) {
        for (double& v : in) v = -700.0 * g.uniform01();
        simd::exp4_avx2(in, out);
        for (int lane = 0; lane < 4; ++lane) {
            const double ref = std::exp(in[lane]);
            CHECK(out[lane] == doctest::Approx(ref).epsilon(1e-13));
        }
    }
    // Exact anchors and the flush-to-zero edge.
    in[0] = 0.0; in[1] = -1.0; in[2] = -710.0; in[3] = -0.5;
    simd::exp4_avx2(in, out);
    CHECK(out[0] == 1.0);
    CHECK(out[1] == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(out[2] == 0.0);
    CHECK(out[3] == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
}

TEST_CASE("avx2 gram agrees with scalar" * doctest::skip(!simd::cpu_supports_avx2())) {
    rng::Xoshiro256pp g(321);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t na = 1 + static_cast<std::size_t>(g.next() % 64);
        const std::size_t nb = 1 + static_cast<std::size_t>(g.next() % 64);
        std::vector<double> a0(na), a1(na), b0(nb), b1(nb);
        for (auto& v : a0) v = 4.0 * g.uniform01();
        for (auto& v : a1) v = 4.0 * g.uniform01();
        for (auto& v : b0) v = 4.0 * g.uniform01();
        for (auto& v : b1) v = 4.0 * g.uniform01();
        const double beta = 0.25 + 2.0 * g.uniform01();
        const double ref =
            simd::gram_sum_soa_scalar(beta, a0.data(), a1.data(), na, b0.data(), b1.data(), nb);
        const double got =
            simd::gram_sum_soa_avx2(beta, a0.data(), a1.data(), na, b0.data(), b1.data(), nb);
        CHECK(got == doctest::Approx(ref).epsilon(1e-12));
    }
}
#endif

TEST_CASE("forcing the scalar backend takes effect") {
    simd::force_backend(simd::Backend::scalar);
    CHECK(simd::active_backend() == simd::Backend::scalar);
    simd::force_backend(std::nullopt);
#if defined(QCD_HAVE_AVX2)
    if (simd::cpu_supports_avx2()) CHECK(simd::active_backend() == simd::Backend::avx2);
#endif
}
