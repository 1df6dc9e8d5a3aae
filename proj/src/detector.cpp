#include "qcd/detector.hpp"

#include <algorithm>
#include <cmath>

namespace qcd::detector {

namespace {

std::vector<kernel::StatePair> consecutive_pairs(const std::vector<double>& buf) {
    std::vector<kernel::StatePair> pairs(buf.size() - 1);
    for (std::size_t i = 0; i + 1 < buf.size(); ++i)
        pairs[i] = kernel::StatePair{buf[i], buf[i + 1]};
    return pairs;
}

template <typename Window>
std::vector<kernel::StatePair> window_pairs(const Window& win) {
    std::vector<kernel::StatePair> pairs;
    pairs.reserve(win.size() - 1);
    auto it = win.begin();
    double prev = *it++;
    for (; it != win.end(); ++it) {
        pairs.push_back(kernel::StatePair{prev, *it});
        prev = *it;
    }
    return pairs;
}

}  // namespace

void DetectorConfig::validate() const {
    if (m < 3) throw std::invalid_argument("detector: block size m must be >= 3");
    if (!(sigma > 0.0)) throw std::invalid_argument("detector: sigma must be > 0");
    // threshold 0 is the degenerate alarm-on-first-positive-score case;
    // +inf is used when instrumenting call counts.
    if (!(threshold >= 0.0)) throw std::invalid_argument("detector: threshold must be >= 0");
    kernel.validate();
}

StepEvent push(OralState& state, const DetectorConfig& config, double x, double y) {
    config.validate();
    if (state.alarmed_at)
        throw std::logic_error("detector: push after alarm");

    state.buffer_x.push_back(x);
    state.buffer_y.push_back(y);
    ++state.samples;

    StepEvent ev;
    ev.sample_index = state.samples;
    if (state.buffer_x.size() < config.m) return ev;

    mmd::BlockPair block{consecutive_pairs(state.buffer_x),
                         consecutive_pairs(state.buffer_y)};
    const double score =
        mmd::block_mmd(config.kernel, block, &state.kernel_calls) - config.sigma;
    state.w = std::max(0.0, state.w + score);
    state.buffer_x.clear();
    state.buffer_y.clear();
    ++state.blocks;

    ev.kind = StepEvent::Kind::block_completed;
    ev.block_index = state.blocks;
    ev.score = score;
    ev.statistic = state.w;
    if (state.w > config.threshold) {
        state.alarmed_at = state.samples;  // == m * blocks
        ev.kind = StepEvent::Kind::alarm;
    }
    return ev;
}

StepEvent ral_push(RalState& state, const DetectorConfig& config, double x, double y) {
    config.validate();
    if (state.alarmed_at)
        throw std::logic_error("detector: push after alarm");

    state.window_x.push_back(x);
    state.window_y.push_back(y);
    if (state.window_x.size() > config.m) {
        state.window_x.pop_front();
        state.window_y.pop_front();
    }
    ++state.samples;

    StepEvent ev;
    ev.sample_index = state.samples;
    if (state.window_x.size() < config.m) return ev;  // warm-up

    mmd::BlockPair block{window_pairs(state.window_x), window_pairs(state.window_y)};
    const double score =
        mmd::block_mmd(config.kernel, block, &state.kernel_calls) - config.sigma;
    state.w = std::max(0.0, state.w + score);
    ++state.windows;

    ev.kind = StepEvent::Kind::block_completed;
    ev.block_index = state.windows;
    ev.score = score;
    ev.statistic = state.w;
    if (state.w > config.threshold) {
        state.alarmed_at = state.samples;
        ev.kind = StepEvent::Kind::alarm;
    }
    return ev;
}

}  // namespace qcd::detector
