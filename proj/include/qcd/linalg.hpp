#pragma once

#include <cstddef>
#include <vector>

namespace qcd::linalg {

/// Dense square matrix, row-major. Small chains only; no sparsity, no BLAS.
struct Mat {
    std::size_t n = 0;
    std::vector<double> a;

    Mat() = default;
    explicit Mat(std::size_t n_) : n(n_), a(n_ * n_, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }

    static Mat identity(std::size_t n);
};

Mat mul(const Mat& x, const Mat& y);

double frobenius_norm(const Mat& m);

/// Solves A x = b by Gaussian elimination with partial pivoting.
/// Throws std::runtime_error if A is (numerically) singular.
std::vector<double> solve(Mat a, std::vector<double> b);

/// Spectral radius of a square matrix, computed as the Gelfand limit
/// ||M^(2^J)||_F^(1/2^J) with renormalized repeated squaring in log space.
/// Accurate to ~1e-10 for the small matrices used here; returns 0 for the
/// zero (or nilpotent) matrix.
double spectral_radius(const Mat& m);

}  // namespace qcd::linalg
