#pragma once

#include <cstdint>
#include <span>

#include "qcd/kernel.hpp"
#include "qcd/markov.hpp"

namespace qcd::mmd {

/// One detection block: m raw samples from each stream reduced to m-1
/// consecutive pairs each.
struct BlockPair {
    std::vector<kernel::StatePair> x_pairs;
    std::vector<kernel::StatePair> y_pairs;

    std::size_t block_size() const { return x_pairs.size() + 1; }  // m
    void validate() const;
};

/// Biased block MMD between the empirical pair measures:
///   (1/(m-1)) * sqrt( sum k(x,x') + sum k(y,y') - 2 sum k(x,y) )
/// with all (m-1)^2 terms of each double sum included (diagonal too). The
/// radicand is clamped at 0 before the root; floating-point cancellation can
/// push it a few ulp negative. Result is in [0, sqrt(2)] for bounded kernels.
double block_mmd(const kernel::KernelSpec& spec, const BlockPair& block,
                 std::uint64_t* calls = nullptr);

/// Exact population MMD between two pair measures on the same finite state
/// space: sqrt( E_ff k + E_gg k - 2 E_fg k ), evaluated as weighted sums.
double population_mmd(const kernel::KernelSpec& spec, const markov::PairMeasure& f,
                      const markov::PairMeasure& g);

/// Exact MMD between the empirical measure of a pair sample and a pair
/// measure — the distance Monte Carlo checks compare against its bound.
double sample_measure_mmd(const kernel::KernelSpec& spec,
                          std::span<const kernel::StatePair> sample,
                          const markov::PairMeasure& f);

/// Exact dependence coefficient between pair samples i and j (1 <= i < j)
/// conditioned on Z_0 = z0:
///   rho_{i,j}(z0) = | E[k(Zi~,Zj~)|z0] - E[k(Zi~,Z~)|z0] - E[k(Zj~,Z~)|z0]
///                    + E[k(Z~,Z~')] |
/// with Z~, Z~' drawn from the stationary pair measure. Evaluated by matrix
/// powers of the kernel — no sampling.
double rho_exact(const kernel::KernelSpec& spec, const markov::TransitionKernel& k,
                 std::size_t i, std::size_t j, std::size_t z0);

/// Per-block conditional mean-MMD bound constant:
///   a = sqrt( (2 - 2*lambda + 4*R) / ((m-1) * (1-lambda)) ).
double a_constant(const markov::ErgodicityParams& params, std::size_t m);

}  // namespace qcd::mmd
