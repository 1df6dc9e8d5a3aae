#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qcd/kernel.hpp"
#include "qcd/mmd.hpp"

namespace qcd::detector {

enum class Algorithm { oral, ral };

struct DetectorConfig {
    std::size_t m = 10;          // raw samples per block
    double sigma = 0.3;          // per-block drift offset
    double threshold = 1.0;      // alarm level c
    kernel::KernelSpec kernel{};

    void validate() const;
};

struct StepEvent {
    enum class Kind { none, block_completed, alarm };
    Kind kind = Kind::none;
    std::size_t block_index = 0;   // completed blocks so far (1-based at emit)
    double score = 0.0;            // S_t = block MMD - sigma
    double statistic = 0.0;        // w after the update
    std::uint64_t sample_index = 0;
};

/// Non-overlapping-block CuSum state. One logical stream owns one state;
/// pushes after the alarm are rejected.
struct OralState {
    double w = 0.0;
    std::vector<double> buffer_x;
    std::vector<double> buffer_y;
    std::uint64_t samples = 0;
    std::size_t blocks = 0;
    std::optional<std::uint64_t> alarmed_at;
    std::uint64_t kernel_calls = 0;
};

/// Feeds one (x, y) sample pair. When the buffers reach m samples the block
/// is reduced to m-1 consecutive pairs per stream, scored with
/// S = block_mmd - sigma, folded into w = max(0, w + S), and the buffers are
/// emptied. Crossing w > c raises the alarm at the block boundary, i.e. at
/// raw-sample index m*(t+1).
StepEvent push(OralState& state, const DetectorConfig& config, double x, double y);

/// Sliding-window baseline state: after an m-sample warm-up every push
/// re-scores the full window, so its per-sample cost is a whole block's.
struct RalState {
    double w = 0.0;
    std::deque<double> window_x;
    std::deque<double> window_y;
    std::uint64_t samples = 0;
    std::size_t windows = 0;
    std::optional<std::uint64_t> alarmed_at;
    std::uint64_t kernel_calls = 0;
};

StepEvent ral_push(RalState& state, const DetectorConfig& config, double x, double y);

struct RunOutcome {
    std::optional<std::uint64_t> alarm_index;  // nullopt = censored
    std::uint64_t samples = 0;
    std::uint64_t kernel_calls = 0;

    bool censored() const { return !alarm_index.has_value(); }
};

/// Drives a detector over paired sample sources until alarm or until
/// max_samples is reached (censored). Sources are callables returning the
/// next value; exhaustion must surface as an exception from the source.
template <typename XSource, typename YSource>
RunOutcome run_to_alarm(const DetectorConfig& config, XSource&& xs, YSource&& ys,
                        std::uint64_t max_samples, Algorithm algorithm = Algorithm::oral) {
    config.validate();
    RunOutcome out;
    auto drive = [&](auto& state, auto push_fn) {
        for (std::uint64_t i = 0; i < max_samples; ++i) {
            const StepEvent ev = push_fn(state, config, xs(), ys());
            if (ev.kind == StepEvent::Kind::alarm) {
                out.alarm_index = ev.sample_index;
                break;
            }
        }
        out.samples = state.samples;
        out.kernel_calls = state.kernel_calls;
    };
    if (algorithm == Algorithm::oral) {
        OralState state;
        drive(state, [](OralState& s, const DetectorConfig& c, double x, double y) {
            return push(s, c, x, y);
        });
    } else {
        RalState state;
        drive(state, [](RalState& s, const DetectorConfig& c, double x, double y) {
            return ral_push(s, c, x, y);
        });
    }
    return out;
}

/// Replays a recorded stream; throws on exhaustion.
class ReplaySource {
  public:
    explicit ReplaySource(std::vector<double> values) : values_(std::move(values)) {}

    double operator()() {
        if (pos_ >= values_.size())
            throw std::runtime_error("replay stream exhausted");
        return values_[pos_++];
    }

  private:
    std::vector<double> values_;
    std::size_t pos_ = 0;
};

}  // namespace qcd::detector
