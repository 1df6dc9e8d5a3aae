#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace qcd::kernel {

/// Consecutive-sample pair (x_i, x_{i+1}) embedded in R^2.
struct StatePair {
    double first = 0.0;
    double second = 0.0;

    friend bool operator==(const StatePair&, const StatePair&) = default;
};

enum class Family { gaussian };

/// Bounded positive-definite kernel. The Gaussian family on scalars is
/// k(x,y) = exp(-bandwidth * (x-y)^2); on pairs it is the product-space
/// Gaussian exp(-bandwidth * ||x-y||^2), which keeps 0 <= k <= 1 and
/// k(x,x) = 1.
struct KernelSpec {
    Family family = Family::gaussian;
    double bandwidth = 1.0;

    void validate() const;
};

std::string_view family_name(Family f);
Family family_from_name(std::string_view name);

double eval_scalar(const KernelSpec& spec, double x, double y);

double eval_pair(const KernelSpec& spec, const StatePair& x, const StatePair& y);

/// sum_i sum_j k(a_i, b_j). Throws on empty input. When `calls` is given it
/// is incremented by |a|*|b| — the logical kernel-evaluation count, which is
/// independent of the vector backend actually used.
double gram_sum(const KernelSpec& spec, std::span<const StatePair> a,
                std::span<const StatePair> b, std::uint64_t* calls = nullptr);

}  // namespace qcd::kernel
