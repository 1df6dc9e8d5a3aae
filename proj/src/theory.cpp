#include "qcd/theory.hpp"

#include <cmath>
#include <stdexcept>

#include "qcd/mmd.hpp"

namespace qcd::theory {

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

AppendixConstants appendix_constants(double r, double lambda, std::size_t m) {
    if (!(lambda > 0.0) || lambda >= 1.0)
        throw std::invalid_argument("appendix_constants: lambda must lie in (0,1)");
    if (r < 1.0)
        throw std::invalid_argument("appendix_constants: R must be >= 1");
    if (m < 2) throw std::invalid_argument("appendix_constants: m must be >= 2");

    AppendixConstants out;
    double decay = lambda;
    std::uint64_t zeta = 1;
    while (2.0 * r * decay >= 1.0) {
        decay *= lambda;
        ++zeta;
        if (zeta > 1'000'000)
            throw std::runtime_error("appendix_constants: zeta search diverged");
    }
    out.zeta = zeta;
    const double z = static_cast<double>(zeta);
    out.eta = 2.0 * r * decay;

    const double eta_root = std::pow(out.eta, 1.0 / z);           // eta^{1/zeta}
    const double eta_neg = std::pow(out.eta, -(z - 1.0) / z);     // eta^{-(zeta-1)/zeta}
    out.chi = eta_neg / (1.0 - eta_root / 2.0);
    out.u = 1.0 / (1.0 + eta_root / 2.0);

    const double two_r = 2.0 * r;
    const double term1 = (two_r - 1.0) / (1.0 - std::pow(two_r, -1.0 / z)) * out.chi;
    const double term2 = (1.0 - 1.0 / out.eta) / (1.0 - std::pow(out.eta, -1.0 / z));
    const double term3 = 2.0 / (1.0 + eta_root) * eta_neg;
    out.big_m = term1 + term2 + term3;

    const double contraction = std::max(lambda, std::pow(out.u, -0.25));
    const double numer = (1.0 - contraction) * (1.0 - contraction);
    const double inner = 5.0 / std::log(out.u) + 8.0 * out.big_m * r * out.chi;
    out.gamma = numer / (32.0 * r * out.chi) / inner /
                (4.0 * static_cast<double>(m) * static_cast<double>(m));
    if (!(out.gamma > 0.0) || !std::isfinite(out.gamma))
        throw std::runtime_error("appendix_constants: Gamma is not positive");
    return out;
}

std::optional<double> wadd_upper_bound(double d_pq, double sigma, double a_p,
                                       double a_q, std::size_t m, double c) {
    if (!(d_pq > 0.0) || !(sigma > 0.0) || !(c > 0.0) || a_p < 0.0 || a_q < 0.0)
        throw std::invalid_argument("wadd_upper_bound: non-positive input");
    if (m < 2) throw std::invalid_argument("wadd_upper_bound: m must be >= 2");
    if (d_pq <= sigma)
        throw std::invalid_argument("wadd_upper_bound: requires D(F_P,F_Q) > sigma");

    const double a = a_p + a_q;
    const double gap = d_pq - sigma;
    if (gap - a <= 0.0) return std::nullopt;  // vacuous

    const double md = static_cast<double>(m);
    const double denom = (gap - a) * (gap - a);
    const double t1 = 2.0 * std::sqrt(gap * a) * md * c / denom;
    const double t2 = (gap + a) * md * c / denom;
    const double t3 = 2.0 * md;
    const double t4 = (a + std::sqrt(gap * a)) / (gap - a) * md;
    return t1 + t2 + t3 + t4;
}

double phi(double q, double gamma, double h) {
    return std::sqrt(kPi / gamma) * q * std::exp(-q * h + q * q / (4.0 * gamma));
}

double solve_q(double gamma, double h) {
    if (!(gamma > 0.0)) throw std::invalid_argument("solve_q: Gamma must be > 0");

    // phi is strictly increasing on the relevant range (its log-derivative
    // 1/q - h + q/(2 Gamma) >= sqrt(2/Gamma) - h stays positive for every
    // Gamma this project produces), so the feasible set {phi <= 1} is an
    // interval anchored at 0 and bisection on phi = 1 is sound.
    const double cap = 2.0 * gamma * h;
    if (h > 0.0 && phi(cap, gamma, h) <= 1.0) return cap;

    double hi = (h > 0.0) ? cap : 1.0;
    if (h <= 0.0) {
        while (phi(hi, gamma, h) <= 1.0) {
            hi *= 2.0;
            if (!std::isfinite(hi)) throw std::runtime_error("solve_q: no finite root");
        }
    }
    double lo = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (phi(mid, gamma, h) <= 1.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-10 * hi) break;
    }
    if (lo <= 0.0) throw std::runtime_error("solve_q: failed to bracket a positive q");
    return lo;
}

double arl_lower_bound(std::size_t m, double q, double c) {
    if (!(q > 0.0)) throw std::invalid_argument("arl_lower_bound: q must be > 0");
    if (c < 0.0) throw std::invalid_argument("arl_lower_bound: c must be >= 0");
    return static_cast<double>(m) * std::exp(q * c);
}

BoundsReport calibrate(const detector::DetectorConfig& config,
                       const markov::TransitionKernel& kernel_p,
                       const markov::TransitionKernel& kernel_q,
                       std::size_t horizon) {
    config.validate();
    BoundsReport rep;
    rep.m = config.m;
    rep.sigma = config.sigma;
    rep.threshold = config.threshold;
    rep.bandwidth = config.kernel.bandwidth;

    rep.cert_p = markov::ergodicity_constants(kernel_p, horizon);
    rep.cert_q = markov::ergodicity_constants(kernel_q, horizon);
    rep.pair_cert_p = markov::second_order_ergodicity(rep.cert_p);
    rep.pair_cert_q = markov::second_order_ergodicity(rep.cert_q);

    rep.d_pq = mmd::population_mmd(config.kernel, markov::pair_measure(kernel_p),
                                   markov::pair_measure(kernel_q));
    rep.a_p = mmd::a_constant(rep.pair_cert_p, config.m);
    rep.a_q = mmd::a_constant(rep.pair_cert_q, config.m);

    rep.sigma_detectable = config.sigma < rep.d_pq;
    if (!rep.sigma_detectable)
        rep.notes.push_back(
            "sigma >= D(F_P,F_Q): the statistic has no positive post-change "
            "drift; lower sigma below the reported d_pq");

    const double a = rep.a_p + rep.a_q;
    const double gap = rep.d_pq - config.sigma;
    if (gap > a) {
        rep.xi = (a + std::sqrt(gap * a)) / (gap - a);
        rep.n_c = std::ceil((rep.xi + 1.0) * config.threshold / gap);
        rep.delta = a / gap * (1.0 + 1.0 / rep.xi);
        rep.wadd_feasible = rep.delta < 1.0;
        if (rep.wadd_feasible)
            rep.wadd_upper = wadd_upper_bound(rep.d_pq, config.sigma, rep.a_p, rep.a_q,
                                              config.m, config.threshold);
    }
    if (!rep.wadd_feasible)
        rep.notes.push_back(
            "delay bound vacuous: D(F_P,F_Q) - sigma <= a_P + a_Q; increase the "
            "block size m (a shrinks as 1/sqrt(m-1)) or adjust sigma");

    rep.appendix =
        appendix_constants(rep.pair_cert_p.R, rep.pair_cert_p.lambda, config.m);
    rep.h = config.sigma - 2.0 * rep.a_p;
    rep.h_positive = rep.h > 0.0;
    if (!rep.h_positive)
        rep.notes.push_back(
            "h = sigma - 2 a_P <= 0: the run-length certificate is weak at this "
            "block size; increase m until 2 a_P < sigma");
    rep.q = solve_q(rep.appendix.gamma, rep.h);
    rep.arl_lower = arl_lower_bound(config.m, rep.q, config.threshold);
    return rep;
}

}  // namespace qcd::theory
