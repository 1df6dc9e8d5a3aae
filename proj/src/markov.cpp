#include "qcd/markov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qcd::markov {

namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kLambdaFloor = 1e-6;

std::uint32_t sample_categorical(std::span<const double> weights, double u) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) return static_cast<std::uint32_t>(i);
    }
    return static_cast<std::uint32_t>(weights.size() - 1);
}

void check_same_space(const TransitionKernel& a, const TransitionKernel& b) {
    if (a.n_states() != b.n_states() || a.state_values != b.state_values)
        throw std::invalid_argument("markov: kernels live on different state spaces");
}

void check_distribution(std::span<const double> dist, std::size_t n) {
    if (dist.size() != n)
        throw std::invalid_argument("markov: distribution size mismatch");
    double sum = 0.0;
    for (double w : dist) {
        if (w < -kRowSumTol) throw std::invalid_argument("markov: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("markov: distribution does not sum to 1");
}

double total_variation(const double* p, const double* q, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::abs(p[i] - q[i]);
    return 0.5 * s;
}

}  // namespace

TransitionKernel TransitionKernel::make(linalg::Mat rows,
                                        std::vector<double> state_values) {
    const std::size_t n = rows.n;
    if (n < 2) throw std::invalid_argument("markov: need at least 2 states");
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double p = rows(i, j);
            if (p < 0.0 || p > 1.0)
                throw std::invalid_argument("markov: entry outside [0,1]");
            sum += p;
        }
        if (std::abs(sum - 1.0) > kRowSumTol)
            throw std::invalid_argument("markov: row does not sum to 1");
    }
    if (state_values.empty()) {
        state_values.resize(n);
        std::iota(state_values.begin(), state_values.end(), 0.0);
    }
    if (state_values.size() != n)
        throw std::invalid_argument("markov: state_values size mismatch");
    return TransitionKernel{std::move(state_values), std::move(rows)};
}

bool is_primitive(const TransitionKernel& k) {
    const std::size_t n = k.n_states();
    // Wielandt: P primitive iff P^(n^2 - 2n + 2) is entrywise positive.
    std::vector<char> reach(n * n), step(n * n), next(n * n);
    for (std::size_t i = 0; i < n * n; ++i)
        reach[i] = step[i] = (k.rows.a[i] > 0.0) ? 1 : 0;
    const std::size_t power = n * n - 2 * n + 2;
    for (std::size_t t = 1; t < power; ++t) {
        std::fill(next.begin(), next.end(), 0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t l = 0; l < n; ++l)
                if (step[i * n + l])
                    for (std::size_t j = 0; j < n; ++j)
                        if (reach[l * n + j]) next[i * n + j] = 1;
        step.swap(next);
        // `reach` stays P's pattern; `step` is now the pattern of P^(t+1).
    }
    return std::all_of(step.begin(), step.end(), [](char c) { return c != 0; });
}

std::vector<double> stationary(const TransitionKernel& k) {
    if (!is_primitive(k))
        throw std::runtime_error(
            "markov: chain is reducible or periodic; no unique ergodic "
            "stationary distribution");
    const std::size_t n = k.n_states();
    // Solve (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
    linalg::Mat a(n);
    std::vector<double> b(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            a(i, j) = k.rows(j, i) - (i == j ? 1.0 : 0.0);
    for (std::size_t j = 0; j < n; ++j) a(n - 1, j) = 1.0;
    b[n - 1] = 1.0;
    std::vector<double> pi = linalg::solve(std::move(a), std::move(b));

    double sum = std::accumulate(pi.begin(), pi.end(), 0.0);
    for (double& p : pi) p /= sum;
    for (std::size_t j = 0; j < n; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < n; ++i) col += pi[i] * k.rows(i, j);
        if (std::abs(col - pi[j]) > kRowSumTol)
            throw std::runtime_error("markov: stationary residual exceeds 1e-12");
    }
    return pi;
}

ErgodicityParams ergodicity_constants(const TransitionKernel& k, std::size_t horizon) {
    if (horizon == 0) throw std::invalid_argument("markov: horizon must be >= 1");
    const std::vector<double> pi = stationary(k);
    const std::size_t n = k.n_states();

    // Deflate the Perron root: E = P - 1 pi^T has the same spectrum as P
    // with the eigenvalue 1 replaced by 0, so rho(E) is the SLEM.
    linalg::Mat e = k.rows;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) e(i, j) -= pi[j];
    double lambda = linalg::spectral_radius(e);
    if (lambda >= 1.0)
        throw std::runtime_error("markov: chain is not ergodic (SLEM >= 1)");
    lambda = std::max(lambda, kLambdaFloor);

    double r = 1.0;
    linalg::Mat pt = k.rows;
    double lt = lambda;
    for (std::size_t t = 1; t <= horizon; ++t) {
        for (std::size_t z = 0; z < n; ++z) {
            double tv = total_variation(&pt.a[z * n], pi.data(), n);
            if (tv < 1e-14) tv = 0.0;  // numerical zero; keeps rank-one chains at R=1
            r = std::max(r, tv / lt);
        }
        if (t < horizon) {
            pt = linalg::mul(pt, k.rows);
            lt *= lambda;
        }
    }
    return ErgodicityParams{r, lambda};
}

ErgodicityParams second_order_ergodicity(const ErgodicityParams& p) {
    return ErgodicityParams{p.R / p.lambda, p.lambda};
}

PairMeasure pair_measure(const TransitionKernel& k) {
    const std::vector<double> pi = stationary(k);
    const std::size_t n = k.n_states();
    linalg::Mat w(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) w(a, b) = pi[a] * k.rows(a, b);
    double mass = std::accumulate(w.a.begin(), w.a.end(), 0.0);
    if (std::abs(mass - 1.0) > kRowSumTol)
        throw std::runtime_error("markov: pair measure mass off by more than 1e-12");
    return PairMeasure{k.state_values, std::move(w)};
}

linalg::Mat pair_transition_matrix(const TransitionKernel& k) {
    const std::size_t n = k.n_states();
    linalg::Mat t(n * n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t d = 0; d < n; ++d)
                t(a * n + b, b * n + d) = k.rows(b, d);
    return t;
}

std::vector<double> point_mass(std::size_t n_states, std::size_t state) {
    if (state >= n_states) throw std::invalid_argument("markov: state out of range");
    std::vector<double> d(n_states, 0.0);
    d[state] = 1.0;
    return d;
}

std::vector<std::uint32_t> simulate_states(const TransitionKernel& pre,
                                           const TransitionKernel& post,
                                           std::optional<std::uint64_t> change_point,
                                           std::uint64_t length, std::uint64_t seed,
                                           std::span<const double> initial) {
    check_same_space(pre, post);
    check_distribution(initial, pre.n_states());
    if (length == 0) throw std::invalid_argument("markov: length must be positive");

    rng::Xoshiro256pp gen(seed);
    const std::size_t n = pre.n_states();
    std::vector<std::uint32_t> path;
    path.reserve(length);
    std::uint32_t state = sample_categorical(initial, gen.uniform01());
    path.push_back(state);
    for (std::uint64_t i = 2; i <= length; ++i) {
        const bool post_change = change_point && i >= std::max<std::uint64_t>(*change_point, 2);
        const TransitionKernel& k = post_change ? post : pre;
        state = sample_categorical({&k.rows.a[state * n], n}, gen.uniform01());
        path.push_back(state);
    }
    return path;
}

std::vector<double> simulate(const TransitionKernel& pre, const TransitionKernel& post,
                             std::optional<std::uint64_t> change_point,
                             std::uint64_t length, std::uint64_t seed,
                             std::span<const double> initial) {
    const auto states = simulate_states(pre, post, change_point, length, seed, initial);
    std::vector<double> values(states.size());
    for (std::size_t i = 0; i < states.size(); ++i)
        values[i] = pre.state_values[states[i]];
    return values;
}

std::vector<kernel::StatePair> second_order(std::span<const double> path) {
    if (path.size() < 2)
        throw std::invalid_argument("second_order: need at least 2 samples");
    std::vector<kernel::StatePair> pairs(path.size() - 1);
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
        pairs[i] = kernel::StatePair{path[i], path[i + 1]};
    return pairs;
}

StreamSampler::StreamSampler(TransitionKernel pre, TransitionKernel post,
                             std::optional<std::uint64_t> change_point,
                             std::uint64_t seed, std::vector<double> initial)
    : pre_(std::move(pre)),
      post_(std::move(post)),
      change_point_(change_point),
      initial_(std::move(initial)),
      gen_(seed) {
    check_same_space(pre_, post_);
    check_distribution(initial_, pre_.n_states());
}

double StreamSampler::operator()() {
    const std::size_t n = pre_.n_states();
    if (emitted_ == 0) {
        state_ = sample_categorical(initial_, gen_.uniform01());
    } else {
        const std::uint64_t index = emitted_ + 1;  // 1-based sample about to emit
        const bool post_change =
            change_point_ && index >= std::max<std::uint64_t>(*change_point_, 2);
        const TransitionKernel& k = post_change ? post_ : pre_;
        state_ = sample_categorical({&k.rows.a[state_ * n], n}, gen_.uniform01());
    }
    ++emitted_;
    return pre_.state_values[state_];
}

}  // namespace qcd::markov
