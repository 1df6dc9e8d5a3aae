// qcd — kernel MMD change detection for Markov streams.
//
// Subcommands: simulate, detect, bounds, bench, compare.
// Exit codes: 0 success/alarm, 2 input error, 3 censored, 4 infeasible bounds.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qcd/bench.hpp"
#include "qcd/detector.hpp"
#include "qcd/io.hpp"
#include "qcd/markov.hpp"
#include "qcd/simd.hpp"
#include "qcd/theory.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitCensored = 3;
constexpr int kExitInfeasible = 4;

std::string hash_hex(const qcd::bench::ExperimentConfig& cfg) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(qcd::bench::config_hash(cfg)));
    return buf;
}

void write_column_csv(const std::filesystem::path& path, const std::string& header,
                      const std::vector<double>& values) {
    std::ostringstream out;
    out << header << '\n';
    for (double v : values) out << qcd::io::format_double(v) << '\n';
    qcd::io::write_text_file(path, out.str());
}

std::vector<double> read_column_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open stream file: " + path.string());
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            values.push_back(std::stod(line));
        } catch (const std::exception&) {
            if (line_no == 1) continue;  // header row
            throw std::invalid_argument(path.string() + ": line " +
                                        std::to_string(line_no) + ": not a number");
        }
    }
    return values;
}

std::pair<std::vector<double>, std::vector<double>> read_stdin_pairs() {
    std::vector<double> xs, ys;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(std::cin, line)) {
        ++line_no;
        if (line.empty()) continue;
        for (char& ch : line)
            if (ch == ',' || ch == '\t' || ch == ';') ch = ' ';
        std::istringstream ss(line);
        double x, y;
        if (!(ss >> x >> y))
            throw std::invalid_argument("stdin: line " + std::to_string(line_no) +
                                        ": expected two numeric columns");
        xs.push_back(x);
        ys.push_back(y);
    }
    return {std::move(xs), std::move(ys)};
}

int cmd_simulate(const qcd::bench::ExperimentConfig& cfg, std::uint64_t length,
                 const std::string& out_prefix) {
    const std::vector<double> pi = qcd::markov::stationary(cfg.kernel_p);
    const auto x = qcd::markov::simulate(cfg.kernel_p, cfg.kernel_q, cfg.change_point,
                                         length, qcd::rng::derive_stream_seed(cfg.seed, 0),
                                         pi);
    const auto y = qcd::markov::simulate(cfg.kernel_p, cfg.kernel_p, std::nullopt, length,
                                         qcd::rng::derive_stream_seed(cfg.seed, 1), pi);
    write_column_csv(out_prefix + "_x.csv", "x", x);
    write_column_csv(out_prefix + "_y.csv", "y", y);

    nlohmann::json meta = {
        {"seed", cfg.seed},
        {"length", length},
        {"config_hash", hash_hex(cfg)},
        {"tool_version", std::string(qcd::io::kToolVersion)},
        {"generator", "xoshiro256++ seeded via splitmix64(seed ^ stream_index)"},
    };
    if (cfg.change_point)
        meta["change_point"] = *cfg.change_point;
    else
        meta["change_point"] = nullptr;
    qcd::io::write_text_file(out_prefix + "_meta.json", meta.dump(2) + "\n");
    std::cout << "wrote " << out_prefix << "_{x,y}.csv (" << length << " samples)\n";
    return kExitOk;
}

template <typename State, typename PushFn>
int detect_loop(State state, const qcd::detector::DetectorConfig& det, PushFn push_fn,
                const std::vector<double>& xs, const std::vector<double>& ys,
                std::uint64_t max_samples) {
    std::uint64_t n = std::min(xs.size(), ys.size());
    if (max_samples > 0) n = std::min(n, max_samples);
    for (std::uint64_t i = 0; i < n; ++i) {
        const auto ev = push_fn(state, det, xs[i], ys[i]);
        if (ev.kind == qcd::detector::StepEvent::Kind::none) continue;
        std::cout << ev.block_index << ',' << qcd::io::format_double(ev.score) << ','
                  << qcd::io::format_double(ev.statistic) << '\n';
        if (ev.kind == qcd::detector::StepEvent::Kind::alarm) {
            const nlohmann::json record = {{"alarm", true},
                                           {"alarm_index", ev.sample_index},
                                           {"block_index", ev.block_index},
                                           {"w", ev.statistic},
                                           {"samples", state.samples},
                                           {"kernel_calls", state.kernel_calls}};
            std::cout << record.dump() << '\n';
            return kExitOk;
        }
    }
    const nlohmann::json record = {{"alarm", false},
                                   {"samples", state.samples},
                                   {"w", state.w},
                                   {"kernel_calls", state.kernel_calls}};
    std::cout << record.dump() << '\n';
    return kExitCensored;
}

int cmd_detect(const qcd::bench::ExperimentConfig& cfg, const std::string& algorithm,
               const std::string& x_file, const std::string& y_file,
               std::uint64_t max_samples) {
    std::vector<double> xs, ys;
    if (!x_file.empty() || !y_file.empty()) {
        if (x_file.empty() || y_file.empty())
            throw std::invalid_argument("--x-file and --y-file must be given together");
        xs = read_column_csv(x_file);
        ys = read_column_csv(y_file);
    } else {
        std::tie(xs, ys) = read_stdin_pairs();
    }
    if (xs.empty() || ys.empty()) throw std::invalid_argument("empty input stream");
    if (xs.size() != ys.size())
        throw std::invalid_argument("x and y streams differ in length");

    if (qcd::bench::algorithm_from_name(algorithm) == qcd::detector::Algorithm::oral)
        return detect_loop(
            qcd::detector::OralState{}, cfg.detector,
            [](auto& s, const auto& c, double x, double y) {
                return qcd::detector::push(s, c, x, y);
            },
            xs, ys, max_samples);
    return detect_loop(
        qcd::detector::RalState{}, cfg.detector,
        [](auto& s, const auto& c, double x, double y) {
            return qcd::detector::ral_push(s, c, x, y);
        },
        xs, ys, max_samples);
}

int cmd_bounds(const qcd::bench::ExperimentConfig& cfg, std::size_t horizon,
               const std::string& out_path) {
    const qcd::theory::BoundsReport rep =
        qcd::theory::calibrate(cfg.detector, cfg.kernel_p, cfg.kernel_q, horizon);
    const std::string text = qcd::io::bounds_report_to_json(rep).dump(2) + "\n";
    if (out_path.empty())
        std::cout << text;
    else
        qcd::io::write_text_file(out_path, text);
    if (!rep.fully_feasible()) {
        for (const auto& note : rep.notes) std::cerr << "note: " << note << '\n';
        return kExitInfeasible;
    }
    return kExitOk;
}

int cmd_bench(qcd::bench::ExperimentConfig cfg, const std::string& out_dir,
              bool force_both) {
    if (force_both)
        cfg.algorithms = {qcd::detector::Algorithm::oral, qcd::detector::Algorithm::ral};
    qcd::bench::sweep_and_emit(cfg, out_dir);
    std::cout << "artifacts written to " << out_dir << " (config " << hash_hex(cfg)
              << ", backend " << qcd::simd::backend_name(qcd::simd::active_backend())
              << ")\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kernel MMD change detection for Markov streams"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    bool no_simd = false;
    app.add_option("--config", config_path, "JSON experiment config")->envname("QCD_CONFIG");
    app.add_option("--seed", seed, "override the config seed");
    app.add_flag("--no-simd", no_simd, "force the scalar gram backend");

    auto* sim = app.add_subcommand("simulate", "write seeded x/y sample streams as CSV");
    std::uint64_t length = 1000;
    std::string out_prefix = "stream";
    sim->add_option("--length", length, "samples per stream");
    sim->add_option("--out", out_prefix, "output path prefix");

    auto* det = app.add_subcommand("detect", "run a detector over replayed or piped streams");
    std::string algorithm = "oral";
    std::string x_file, y_file;
    std::uint64_t max_samples = 0;
    det->add_option("--algorithm", algorithm, "oral|ral");
    det->add_option("--x-file", x_file, "monitored stream CSV (default: stdin x,y)");
    det->add_option("--y-file", y_file, "reference stream CSV");
    det->add_option("--max-samples", max_samples, "stop after this many samples (0 = all)");

    auto* bounds = app.add_subcommand("bounds", "emit the certificate report as JSON");
    std::size_t horizon = 50;
    std::string bounds_out;
    bounds->add_option("--horizon", horizon, "ergodicity certificate horizon");
    bounds->add_option("--out", bounds_out, "write the report here instead of stdout");

    auto* bench = app.add_subcommand("bench", "run the ARL/ADD/complexity sweeps");
    std::string bench_out = "bench_out";
    bench->add_option("--out", bench_out, "output directory");

    auto* compare = app.add_subcommand("compare", "bench with both algorithms enabled");
    std::string compare_out = "compare_out";
    compare->add_option("--out", compare_out, "output directory");

    // Overrides shared by all subcommands; precedence flag > config > default.
    std::optional<std::size_t> opt_m, opt_trials, opt_threads;
    std::optional<double> opt_sigma, opt_threshold, opt_bandwidth;
    std::optional<std::uint64_t> opt_max, opt_tau;
    bool no_change = false;
    for (auto* sub : {sim, det, bounds, bench, compare}) {
        sub->fallthrough();  // let --config/--seed/--no-simd appear after the subcommand
        sub->add_option("--m", opt_m, "block size override");
        sub->add_option("--sigma", opt_sigma, "drift offset override");
        sub->add_option("--threshold,-c", opt_threshold, "alarm threshold override");
        sub->add_option("--bandwidth", opt_bandwidth, "kernel bandwidth override");
        sub->add_option("--trials", opt_trials, "Monte Carlo trials override");
        sub->add_option("--threads", opt_threads, "worker threads override");
        sub->add_option("--max-samples-cap", opt_max, "per-trial sample cap override");
        sub->add_option("--tau", opt_tau, "change point override");
        sub->add_flag("--no-change", no_change, "simulate with no change point");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (no_simd) qcd::simd::force_backend(qcd::simd::Backend::scalar);
        if (config_path.empty()) throw std::invalid_argument("--config is required");

        qcd::bench::ExperimentConfig cfg = qcd::io::load_config(config_path);
        if (seed) cfg.seed = *seed;
        if (opt_m) cfg.detector.m = *opt_m;
        if (opt_sigma) cfg.detector.sigma = *opt_sigma;
        if (opt_threshold) cfg.detector.threshold = *opt_threshold;
        if (opt_bandwidth) cfg.detector.kernel.bandwidth = *opt_bandwidth;
        if (opt_trials) cfg.trials = *opt_trials;
        if (opt_threads) cfg.threads = *opt_threads;
        if (opt_max) cfg.max_samples = *opt_max;
        if (opt_tau) cfg.change_point = *opt_tau;
        if (no_change) cfg.change_point = std::nullopt;

        if (sim->parsed()) return cmd_simulate(cfg, length, out_prefix);
        if (det->parsed()) return cmd_detect(cfg, algorithm, x_file, y_file, max_samples);
        if (bounds->parsed()) return cmd_bounds(cfg, horizon, bounds_out);
        if (bench->parsed()) return cmd_bench(cfg, bench_out, false);
        if (compare->parsed()) return cmd_bench(cfg, compare_out, true);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitOk;
}
