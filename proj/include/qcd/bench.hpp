#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qcd/detector.hpp"
#include "qcd/markov.hpp"

namespace qcd::bench {

struct ExperimentConfig {
    markov::TransitionKernel kernel_p;
    markov::TransitionKernel kernel_q;
    detector::DetectorConfig detector;
    std::vector<double> thresholds;             // strictly increasing
    std::vector<double> sigmas = {0.3, 0.35};   // sweep offsets
    std::size_t trials = 200;
    std::optional<std::uint64_t> change_point = 1;  // nullopt = no change
    std::uint64_t max_samples = 100000;
    std::uint64_t seed = 20240901;
    std::vector<detector::Algorithm> algorithms = {detector::Algorithm::oral,
                                                   detector::Algorithm::ral};
    std::size_t threads = 0;  // 0 = hardware concurrency

    void validate() const;
};

struct CellStats {
    double mean = 0.0;
    double se = 0.0;
    double censor_rate = 0.0;
    std::uint64_t kernel_calls = 0;
    double wall_seconds = 0.0;
};

struct RunResult {
    detector::Algorithm algorithm;
    double sigma = 0.0;
    double threshold = 0.0;
    CellStats arl;
    CellStats add;
};

/// Mean alarm index under the no-change hypothesis, per threshold. Censored
/// trials count as max_samples, which biases the estimate downward; cells
/// with censor_rate > 0.2 are flagged as lower bounds in emitted metadata.
std::vector<RunResult> estimate_arl(const ExperimentConfig& config);

/// Mean detection delay (alarm - tau)^+ for a finite change point
/// (default tau = 1, the worst-case-start surrogate), per threshold.
std::vector<RunResult> estimate_add(const ExperimentConfig& config);

struct ComplexityRow {
    std::uint64_t n = 0;
    detector::Algorithm algorithm;
    std::uint64_t kernel_calls = 0;
    double wall_seconds = 0.0;
};

/// Instrumented kernel-call counts (and wall time) after n samples of a
/// no-change stream with an unreachable threshold, for each algorithm.
std::vector<ComplexityRow> complexity_profile(const ExperimentConfig& config,
                                              const std::vector<std::uint64_t>& n_grid);

/// Runs the ARL and ADD sweeps for every (algorithm, sigma, threshold) cell
/// and writes add_vs_logarl.csv, complexity.csv, matching SVG plots, and a
/// metadata.json sidecar (config hash, seed, censoring flags) to out_dir.
/// add_vs_logarl.csv is byte-identical across reruns with the same seed;
/// the wall_seconds column of complexity.csv is the one non-deterministic
/// output field.
void sweep_and_emit(const ExperimentConfig& config, const std::filesystem::path& out_dir);

std::string algorithm_name(detector::Algorithm a);
detector::Algorithm algorithm_from_name(const std::string& name);

/// FNV-1a digest of the canonical JSON form of the config; embedded in every
/// emitted artifact so outputs can be traced to their configuration.
std::uint64_t config_hash(const ExperimentConfig& config);

}  // namespace qcd::bench
