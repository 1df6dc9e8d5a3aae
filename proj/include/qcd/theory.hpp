#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qcd/detector.hpp"
#include "qcd/markov.hpp"

namespace qcd::theory {

/// Concentration constants for the pair-block deviation bound, evaluated
/// from certified (R, lambda):
///   zeta = inf{ i >= 1 : 2 R lambda^i < 1 }
///   eta  = 2 R lambda^zeta
///   chi  = eta^{-(zeta-1)/zeta} / (1 - eta^{1/zeta}/2)
///   u    = 1 / (1 + eta^{1/zeta}/2)
///   M    = (2R-1)/(1-(2R)^{-1/zeta}) * chi + (1-eta^{-1})/(1-eta^{-1/zeta})
///          + 2 (1+eta^{1/zeta})^{-1} eta^{-(zeta-1)/zeta}
///   Gamma = (1 - max(lambda, u^{-1/4}))^2 / (32 R chi)
///           * (5/log(u) + 8 M R chi)^{-1} / (4 m^2)
/// Logs are natural. Requires R >= 1 and lambda in (0,1); asserts Gamma > 0.
struct AppendixConstants {
    std::uint64_t zeta = 0;
    double eta = 0.0;
    double chi = 0.0;
    double u = 0.0;
    double big_m = 0.0;
    double gamma = 0.0;
};

AppendixConstants appendix_constants(double r, double lambda, std::size_t m);

/// Detection-delay bound, affine in the threshold:
///   2 sqrt((D-s)(aP+aQ)) m c / (D-s-(aP+aQ))^2
///   + (D-s+aP+aQ) m c / (D-s-(aP+aQ))^2 + 2m
///   + (aP+aQ + sqrt((D-s)(aP+aQ))) / (D-s-(aP+aQ)) * m
/// Returns nullopt (vacuous bound) when D - sigma <= aP + aQ.
/// Requires D > sigma.
std::optional<double> wadd_upper_bound(double d_pq, double sigma, double a_p,
                                       double a_q, std::size_t m, double c);

/// phi(q) = sqrt(pi/Gamma) * q * exp(-q h + q^2 / (4 Gamma)).
double phi(double q, double gamma, double h);

/// Largest q > 0 with phi(q) <= 1, by bisection to 1e-10 relative. For
/// h > 0 the search is capped at the exponent minimizer 2*Gamma*h (the cap
/// itself is returned whenever feasible). For h <= 0 a root of phi = 1
/// still exists — phi(0) = 0 and phi grows without bound — and the bound
/// stays valid for any feasible q, so the largest one is returned rather
/// than failing; callers flag h <= 0 separately.
double solve_q(double gamma, double h);

/// False-alarm guarantee: mean run length >= m * exp(q c).
double arl_lower_bound(std::size_t m, double q, double c);

struct BoundsReport {
    std::size_t m = 0;
    double sigma = 0.0;
    double threshold = 0.0;
    double bandwidth = 1.0;

    markov::ErgodicityParams cert_p, cert_q;            // first-order chains
    markov::ErgodicityParams pair_cert_p, pair_cert_q;  // lifted to pair chains

    double d_pq = 0.0;  // exact population MMD between the pair measures
    double a_p = 0.0;
    double a_q = 0.0;

    // Delay-bound intermediates; meaningful only when wadd_feasible.
    double xi = 0.0;
    double n_c = 0.0;
    double delta = 0.0;
    std::optional<double> wadd_upper;

    AppendixConstants appendix;
    double h = 0.0;
    double q = 0.0;
    double arl_lower = 0.0;

    bool sigma_detectable = false;  // sigma < D(F_P, F_Q)
    bool wadd_feasible = false;     // D - sigma > a_P + a_Q and delta < 1
    bool h_positive = false;        // sigma > 2 a_P

    bool fully_feasible() const {
        return sigma_detectable && wadd_feasible && h_positive;
    }
    std::vector<std::string> notes;  // remediation hints for infeasible parts
};

/// Full certificate for a configuration: exact D(F_P,F_Q), certified
/// ergodicity constants (pair-chain constants feed a_P, a_Q and Gamma),
/// the delay bound, the appendix constants, q, and the run-length bound.
BoundsReport calibrate(const detector::DetectorConfig& config,
                       const markov::TransitionKernel& kernel_p,
                       const markov::TransitionKernel& kernel_q,
                       std::size_t horizon = 50);

}  // namespace qcd::theory
