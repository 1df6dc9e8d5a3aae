#include "qcd/mmd.hpp"

#include <cmath>
#include <stdexcept>

namespace qcd::mmd {

namespace {

// Flattened point/weight view of a pair measure. Zero-weight atoms are kept;
// the sums are tiny either way.
struct Atoms {
    std::vector<kernel::StatePair> points;
    std::vector<double> weights;
};

Atoms flatten(const markov::PairMeasure& f) {
    const std::size_t n = f.n_states();
    Atoms out;
    out.points.reserve(n * n);
    out.weights.reserve(n * n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            out.points.push_back({f.state_values[a], f.state_values[b]});
            out.weights.push_back(f.weights(a, b));
        }
    return out;
}

double weighted_cross(const kernel::KernelSpec& spec, const Atoms& f, const Atoms& g) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.points.size(); ++i) {
        if (f.weights[i] == 0.0) continue;
        double row = 0.0;
        for (std::size_t j = 0; j < g.points.size(); ++j)
            row += g.weights[j] * kernel::eval_pair(spec, f.points[i], g.points[j]);
        s += f.weights[i] * row;
    }
    return s;
}

double sqrt_clamped(double radicand) {
    return std::sqrt(radicand < 0.0 ? 0.0 : radicand);
}

}  // namespace

void BlockPair::validate() const {
    if (x_pairs.size() != y_pairs.size())
        throw std::invalid_argument("BlockPair: pair sequences differ in length");
    if (x_pairs.size() < 2)
        throw std::invalid_argument("BlockPair: block size must be >= 3");
}

double block_mmd(const kernel::KernelSpec& spec, const BlockPair& block,
                 std::uint64_t* calls) {
    block.validate();
    const auto& x = block.x_pairs;
    const auto& y = block.y_pairs;
    const double sxx = kernel::gram_sum(spec, x, x, calls);
    const double syy = kernel::gram_sum(spec, y, y, calls);
    const double sxy = kernel::gram_sum(spec, x, y, calls);
    const double radicand = sxx + syy - 2.0 * sxy;
    return sqrt_clamped(radicand) / static_cast<double>(x.size());
}

double population_mmd(const kernel::KernelSpec& spec, const markov::PairMeasure& f,
                      const markov::PairMeasure& g) {
    spec.validate();
    if (f.state_values != g.state_values)
        throw std::invalid_argument("population_mmd: measures on different state spaces");
    const Atoms fa = flatten(f);
    const Atoms ga = flatten(g);
    const double ff = weighted_cross(spec, fa, fa);
    const double gg = weighted_cross(spec, ga, ga);
    const double fg = weighted_cross(spec, fa, ga);
    return sqrt_clamped(ff + gg - 2.0 * fg);
}

double sample_measure_mmd(const kernel::KernelSpec& spec,
                          std::span<const kernel::StatePair> sample,
                          const markov::PairMeasure& f) {
    spec.validate();
    if (sample.empty()) throw std::invalid_argument("sample_measure_mmd: empty sample");
    const Atoms fa = flatten(f);
    const double p = static_cast<double>(sample.size());

    const double ss = kernel::gram_sum(spec, sample, sample) / (p * p);
    const double ff = weighted_cross(spec, fa, fa);
    double sf = 0.0;
    for (const auto& pt : sample)
        for (std::size_t j = 0; j < fa.points.size(); ++j)
            sf += fa.weights[j] * kernel::eval_pair(spec, pt, fa.points[j]);
    sf /= p;
    return sqrt_clamped(ss + ff - 2.0 * sf);
}

double rho_exact(const kernel::KernelSpec& spec, const markov::TransitionKernel& k,
                 std::size_t i, std::size_t j, std::size_t z0) {
    spec.validate();
    if (i == 0 || j <= i) throw std::invalid_argument("rho_exact: need 1 <= i < j");
    const std::size_t n = k.n_states();
    if (z0 >= n) throw std::invalid_argument("rho_exact: start state out of range");

    // Row z0 of P^i, P^{j-i-1} as a full matrix, and row z0 of P^j.
    linalg::Mat pt = k.rows;
    for (std::size_t t = 1; t < i; ++t) pt = linalg::mul(pt, k.rows);
    std::vector<double> dist_i(&pt.a[z0 * n], &pt.a[z0 * n] + n);
    linalg::Mat gap = linalg::Mat::identity(n);
    for (std::size_t t = 0; t < j - i - 1; ++t) gap = linalg::mul(gap, k.rows);
    for (std::size_t t = i; t < j; ++t) pt = linalg::mul(pt, k.rows);
    std::vector<double> dist_j(&pt.a[z0 * n], &pt.a[z0 * n] + n);

    const markov::PairMeasure fp = pair_measure(k);
    const Atoms fa = flatten(fp);
    const auto& v = k.state_values;

    auto pair_at = [&](std::size_t a, std::size_t b) {
        return kernel::StatePair{v[a], v[b]};
    };
    auto measure_mean = [&](const kernel::StatePair& pt_) {
        double s = 0.0;
        for (std::size_t q = 0; q < fa.points.size(); ++q)
            s += fa.weights[q] * kernel::eval_pair(spec, pt_, fa.points[q]);
        return s;
    };

    double term1 = 0.0, term2 = 0.0, term3 = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            const double wi = dist_i[a] * k.rows(a, b);  // P(Z~_i = (a,b) | z0)
            if (wi != 0.0) {
                double inner = 0.0;
                for (std::size_t c = 0; c < n; ++c) {
                    const double reach = gap(b, c);  // P^{j-i-1}(b, c)
                    if (reach == 0.0) continue;
                    for (std::size_t d = 0; d < n; ++d)
                        inner += reach * k.rows(c, d) *
                                 kernel::eval_pair(spec, pair_at(a, b), pair_at(c, d));
                }
                term1 += wi * inner;
                term2 += wi * measure_mean(pair_at(a, b));
            }
            const double wj = dist_j[a] * k.rows(a, b);
            if (wj != 0.0) term3 += wj * measure_mean(pair_at(a, b));
        }
    }
    const double term4 = weighted_cross(spec, fa, fa);
    return std::abs(term1 - term2 - term3 + term4);
}

double a_constant(const markov::ErgodicityParams& params, std::size_t m) {
    if (m < 2) throw std::invalid_argument("a_constant: m must be >= 2");
    if (!(params.lambda > 0.0) || params.lambda >= 1.0)
        throw std::invalid_argument("a_constant: lambda must lie in (0,1)");
    if (params.R < 0.0) throw std::invalid_argument("a_constant: R must be >= 0");
    const double num = 2.0 - 2.0 * params.lambda + 4.0 * params.R;
    const double den = static_cast<double>(m - 1) * (1.0 - params.lambda);
    return std::sqrt(num / den);
}

}  // namespace qcd::mmd
