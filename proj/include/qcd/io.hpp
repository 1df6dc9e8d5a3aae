#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qcd/bench.hpp"
#include "qcd/detector.hpp"
#include "qcd/markov.hpp"
#include "qcd/theory.hpp"

namespace qcd::io {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kToolVersion = "0.1.0";

// JSON shapes:
//   transition kernel  {"states": [...], "rows": [[...], ...]}
//   kernel spec        {"family": "gaussian", "bandwidth": 1.0}
//   detector           {"m": 10, "sigma": 0.3, "threshold": 1.0, "kernel": {...}}
//   experiment config  {"schema": 1, "kernel_p": {...}, "kernel_q": {...},
//                       "detector": {...}, "experiment": {...}}

nlohmann::json kernel_to_json(const markov::TransitionKernel& k);
markov::TransitionKernel kernel_from_json(const nlohmann::json& j);

nlohmann::json spec_to_json(const kernel::KernelSpec& s);
kernel::KernelSpec spec_from_json(const nlohmann::json& j);

nlohmann::json detector_to_json(const detector::DetectorConfig& c);
detector::DetectorConfig detector_from_json(const nlohmann::json& j);

nlohmann::json experiment_to_json(const bench::ExperimentConfig& c);
bench::ExperimentConfig experiment_from_json(const nlohmann::json& j);

nlohmann::json bounds_report_to_json(const theory::BoundsReport& r);

bench::ExperimentConfig load_config(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view bytes);

/// Locale-independent shortest-ish formatting used in every CSV cell, so
/// artifacts are byte-stable across reruns.
std::string format_double(double v);

struct Series {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

/// Minimal line chart (axes, ticks, legend, one polyline per series).
std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<Series>& series);

}  // namespace qcd::io
