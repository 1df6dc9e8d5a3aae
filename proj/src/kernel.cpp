#include "qcd/kernel.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qcd/simd.hpp"

namespace qcd::kernel {

void KernelSpec::validate() const {
    if (family != Family::gaussian)
        throw std::invalid_argument("kernel: unknown family");
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
        throw std::invalid_argument("kernel: bandwidth must be positive");
}

std::string_view family_name(Family f) {
    switch (f) {
        case Family::gaussian: return "gaussian";
    }
    return "unknown";
}

Family family_from_name(std::string_view name) {
    if (name == "gaussian") return Family::gaussian;
    throw std::invalid_argument("kernel: unknown family '" + std::string(name) + "'");
}

double eval_scalar(const KernelSpec& spec, double x, double y) {
    const double d = x - y;
    return std::exp(-spec.bandwidth * d * d);
}

double eval_pair(const KernelSpec& spec, const StatePair& x, const StatePair& y) {
    const double d0 = x.first - y.first;
    const double d1 = x.second - y.second;
    return std::exp(-spec.bandwidth * (d0 * d0 + d1 * d1));
}

namespace {

// Scratch for the AoS -> SoA shuffle feeding the vector kernels. Block sizes
// are small, so the buffers stay hot and never reallocate after warm-up.
struct Scratch {
    std::vector<double> a0, a1, b0, b1;
};

thread_local Scratch g_scratch;

void split(std::span<const StatePair> src, std::vector<double>& c0,
           std::vector<double>& c1) {
    c0.resize(src.size());
    c1.resize(src.size());
    for (std::size_t i = 0; i < src.size(); ++i) {
        c0[i] = src[i].first;
        c1[i] = src[i].second;
    }
}

}  // namespace

double gram_sum(const KernelSpec& spec, std::span<const StatePair> a,
                std::span<const StatePair> b, std::uint64_t* calls) {
    spec.validate();
    if (a.empty() || b.empty())
        throw std::invalid_argument("gram_sum: empty pair sequence");
    if (calls) *calls += static_cast<std::uint64_t>(a.size()) * b.size();
    Scratch& s = g_scratch;
    split(a, s.a0, s.a1);
    split(b, s.b0, s.b1);
    return simd::gram_sum_soa(spec.bandwidth, s.a0.data(), s.a1.data(), a.size(),
                              s.b0.data(), s.b1.data(), b.size());
}

}  // namespace qcd::kernel
