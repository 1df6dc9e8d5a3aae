#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qcd/kernel.hpp"
#include "qcd/linalg.hpp"
#include "qcd/rng.hpp"

namespace qcd::markov {

/// Row-stochastic transition matrix over a finite state space with a numeric
/// embedding of each state (default 0, 1, ..., n-1).
struct TransitionKernel {
    std::vector<double> state_values;
    linalg::Mat rows;

    std::size_t n_states() const { return rows.n; }

    /// Validates row-stochasticity (each row sums to 1 within 1e-12,
    /// entries in [0,1]) and n >= 2. Throws std::invalid_argument.
    static TransitionKernel make(linalg::Mat rows,
                                 std::vector<double> state_values = {});
};

/// Uniform-ergodicity certificate: TV(P^t(z,.), pi) <= R * lambda^t for all
/// states z and t up to the horizon it was computed with.
struct ErgodicityParams {
    double R = 1.0;
    double lambda = 0.5;
};

/// Stationary law of the consecutive-pair process: weights[a][b] = pi(a) P(a,b).
struct PairMeasure {
    std::vector<double> state_values;
    linalg::Mat weights;

    std::size_t n_states() const { return weights.n; }
};

/// True when the chain is irreducible and aperiodic (Wielandt primitivity
/// test on the positivity pattern).
bool is_primitive(const TransitionKernel& k);

/// Stationary distribution with residual ||pi P - pi||_inf < 1e-12.
/// Throws if the chain is reducible or periodic.
std::vector<double> stationary(const TransitionKernel& k);

/// Certified (R, lambda): lambda is the second-largest eigenvalue modulus
/// (floored at 1e-6 for rank-one chains), R the smallest constant >= 1 making
/// TV(P^t(z,.), pi) <= R lambda^t hold for every state and t <= horizon.
/// The certificate is exact — it is computed from full matrix powers.
ErgodicityParams ergodicity_constants(const TransitionKernel& k,
                                      std::size_t horizon = 50);

/// Lifts a certificate to the consecutive-pair chain: the pair (Z_i, Z_{i+1})
/// mixes one step behind Z_i, so (R, lambda) -> (R/lambda, lambda).
ErgodicityParams second_order_ergodicity(const ErgodicityParams& p);

PairMeasure pair_measure(const TransitionKernel& k);

/// Transition matrix of the pair chain on n^2 states indexed a*n + b:
/// (a,b) -> (b,d) with probability P(b,d). Used by the exact oracles.
linalg::Mat pair_transition_matrix(const TransitionKernel& k);

/// Point mass on a state, for conditioning experiments.
std::vector<double> point_mass(std::size_t n_states, std::size_t state);

/// Sample path of state indices. Samples before `change_point` (1-based)
/// evolve under `pre`, samples at or after it under `post`; nullopt means no
/// change. Deterministic given the seed.
std::vector<std::uint32_t> simulate_states(const TransitionKernel& pre,
                                           const TransitionKernel& post,
                                           std::optional<std::uint64_t> change_point,
                                           std::uint64_t length, std::uint64_t seed,
                                           std::span<const double> initial);

/// Same path mapped through state_values.
std::vector<double> simulate(const TransitionKernel& pre, const TransitionKernel& post,
                             std::optional<std::uint64_t> change_point,
                             std::uint64_t length, std::uint64_t seed,
                             std::span<const double> initial);

/// (x_1..x_L) -> [(x_1,x_2), ..., (x_{L-1},x_L)]. Throws if length < 2.
std::vector<kernel::StatePair> second_order(std::span<const double> path);

/// Infinite sample stream with the same change-point semantics as simulate();
/// feeds detectors one value at a time.
class StreamSampler {
  public:
    StreamSampler(TransitionKernel pre, TransitionKernel post,
                  std::optional<std::uint64_t> change_point, std::uint64_t seed,
                  std::vector<double> initial);

    double operator()();

  private:
    TransitionKernel pre_;
    TransitionKernel post_;
    std::optional<std::uint64_t> change_point_;
    std::vector<double> initial_;
    rng::Xoshiro256pp gen_;
    std::uint64_t emitted_ = 0;
    std::uint32_t state_ = 0;
};

}  // namespace qcd::markov
