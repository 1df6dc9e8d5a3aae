#include "qcd/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace qcd::linalg {

Mat Mat::identity(std::size_t n) {
    Mat m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat mul(const Mat& x, const Mat& y) {
    if (x.n != y.n) throw std::invalid_argument("linalg::mul: size mismatch");
    const std::size_t n = x.n;
    Mat r(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const double xik = x(i, k);
            if (xik == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) r(i, j) += xik * y(k, j);
        }
    }
    return r;
}

double frobenius_norm(const Mat& m) {
    double s = 0.0;
    for (double v : m.a) s += v * v;
    return std::sqrt(s);
}

std::vector<double> solve(Mat a, std::vector<double> b) {
    const std::size_t n = a.n;
    if (b.size() != n) throw std::invalid_argument("linalg::solve: size mismatch");
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (std::abs(a(piv, col)) < 1e-14)
            throw std::runtime_error("linalg::solve: singular matrix");
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
            std::swap(b[piv], b[col]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a(r, col) / a(col, col);
            if (f == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= a(ii, j) * x[j];
        x[ii] = s / a(ii, ii);
    }
    return x;
}

double spectral_radius(const Mat& m) {
    constexpr int kSquarings = 48;
    Mat b = m;
    double log_rho = 0.0;
    double scale = 1.0;  // 2^-j weight of the j-th norm
    for (int j = 0; j < kSquarings; ++j) {
        const double norm = frobenius_norm(b);
        if (norm == 0.0 || !std::isfinite(norm)) return 0.0;
        log_rho += scale * std::log(norm);
        scale *= 0.5;
        const double inv = 1.0 / norm;
        for (double& v : b.a) v *= inv;
        b = mul(b, b);
    }
    const double tail = frobenius_norm(b);
    if (tail > 0.0) log_rho += scale * std::log(tail);
    return std::exp(log_rho);
}

}  // namespace qcd::linalg
