// Acceptance suite: one pass/fail line per criterion. Monte Carlo criteria
// use fixed seeds and the stated trial counts; exact criteria tolerate only
// floating-point noise. Returns the number of failed criteria.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "qcd/bench.hpp"
#include "qcd/detector.hpp"
#include "qcd/io.hpp"
#include "qcd/markov.hpp"
#include "qcd/mmd.hpp"
#include "qcd/rng.hpp"
#include "qcd/theory.hpp"
#include "../support/chains.hpp"
#include "../support/oracles.hpp"

using namespace qcd;

namespace {

const kernel::KernelSpec kUnit{kernel::Family::gaussian, 1.0};

int g_failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] C%d %s: %s\n", pass ? "PASS" : "FAIL", index, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double pred = f.intercept + f.slope * x[i];
        ss_res += (y[i] - pred) * (y[i] - pred);
    }
    f.r2 = syy > 0 ? 1.0 - ss_res / syy : 1.0;
    return f;
}

double interpolate(const std::vector<double>& xs, const std::vector<double>& ys,
                   double x) {
    // xs ascending; linear interpolation, clamped at the ends.
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        if (x <= xs[i + 1]) {
            const double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
            return ys[i] + t * (ys[i + 1] - ys[i]);
        }
    return ys.back();
}

// QCD_ACCEPT_SEED overrides the pinned seed; used to confirm the Monte
// Carlo criteria hold with margin rather than by seed luck.
std::uint64_t acceptance_seed() {
    if (const char* env = std::getenv("QCD_ACCEPT_SEED"))
        return std::strtoull(env, nullptr, 10);
    return 20240901;
}

bench::ExperimentConfig base_config() {
    bench::ExperimentConfig cfg;
    cfg.kernel_p = chains::bench_p();
    cfg.kernel_q = chains::bench_q();
    cfg.detector.m = 10;
    cfg.detector.sigma = 0.3;
    cfg.detector.threshold = 1.0;
    cfg.detector.kernel = kUnit;
    cfg.trials = 200;
    cfg.max_samples = 100000;
    cfg.seed = acceptance_seed();
    cfg.change_point = 1;
    cfg.thresholds = {1.0};
    cfg.algorithms = {detector::Algorithm::oral};
    return cfg;
}

// ---- C1: exact dependence and mixing envelopes ------------------------------

void criterion1() {
    char detail[256];
    double worst_margin = 1e300;
    bool pass = true;

    for (const auto& chain : {chains::bench_p(), chains::bench_q()}) {
        const auto cert = markov::ergodicity_constants(chain, 50);
        // Dependence-coefficient bound, all start states, 1 <= i < j <= 12.
        for (std::size_t i = 1; i <= 11 && pass; ++i)
            for (std::size_t j = i + 1; j <= 12 && pass; ++j)
                for (std::size_t z0 = 0; z0 < chain.n_states(); ++z0) {
                    const double rho = mmd::rho_exact(kUnit, chain, i, j, z0);
                    const double bound =
                        2.0 * cert.R * std::pow(cert.lambda, static_cast<double>(j - i - 1));
                    worst_margin = std::min(worst_margin, bound - rho);
                    if (rho > bound + 1e-9) pass = false;
                }

        // Pair-chain envelope with the lifted constants, t <= 50.
        const auto lifted = markov::second_order_ergodicity(cert);
        const auto pm = markov::pair_measure(chain);
        const std::size_t n = chain.n_states(), nn = n * n;
        std::vector<double> f(nn);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) f[a * n + b] = pm.weights(a, b);
        linalg::Mat pt = markov::pair_transition_matrix(chain);
        const linalg::Mat step = pt;
        double lt = lifted.lambda;
        for (std::size_t t = 1; t <= 50 && pass; ++t) {
            for (std::size_t z = 0; z < nn; ++z) {
                double tv = 0.0;
                for (std::size_t k = 0; k < nn; ++k) tv += std::abs(pt(z, k) - f[k]);
                tv *= 0.5;
                if (tv > lifted.R * lt + 1e-12) pass = false;
            }
            pt = linalg::mul(pt, step);
            lt *= lifted.lambda;
        }
    }
    std::snprintf(detail, sizeof(detail),
                  "rho <= 2R lambda^(j-i-1) for i<j<=12 and pair-chain TV envelope to "
                  "t=50, both chains (tightest rho margin %.3g)",
                  worst_margin);
    report(1, "exact dependence/mixing envelopes", pass, detail);
}

// ---- C2: conditional mean block MMD ---------------------------------------

void criterion2() {
    const auto p = chains::bench_p();
    const auto fp = markov::pair_measure(p);
    const auto pair_cert =
        markov::second_order_ergodicity(markov::ergodicity_constants(p, 50));
    bool pass = true;
    std::string detail;
    for (const std::size_t m : {10u, 40u}) {
        const double a_p = mmd::a_constant(pair_cert, m);
        for (std::size_t z = 0; z < p.n_states(); ++z) {
            const int trials = 1000;
            double mean = 0, ss = 0;
            for (int t = 0; t < trials; ++t) {
                const auto path = markov::simulate(
                    p, p, std::nullopt, m + 1,
                    rng::derive_stream_seed(4150 + 13 * m + z, t), markov::point_mass(3, z));
                const std::vector<double> tail(path.begin() + 1, path.end());
                const double d =
                    mmd::sample_measure_mmd(kUnit, markov::second_order(tail), fp);
                mean += d;
                ss += d * d;
            }
            mean /= trials;
            const double sd = std::sqrt((ss - trials * mean * mean) / (trials - 1));
            const double se = sd / std::sqrt(static_cast<double>(trials));
            if (mean > a_p + 3.0 * se) pass = false;
            if (m == 10 && z == 0) {
                char buf[160];
                std::snprintf(buf, sizeof(buf),
                              "mean D = %.3f vs a_P = %.3f (m=10, z=0); ", mean, a_p);
                detail = buf;
            }
        }
    }
    report(2, "conditional mean block MMD bound", pass,
           detail + "all start states, m in {10,40}, 1000 trials each");
}

// ---- C3: run-length certificate ---------------------------------------------

void criterion3() {
    auto cfg = base_config();
    cfg.detector.sigma = 0.35;
    cfg.thresholds = {0.5, 1.0};
    cfg.algorithms = {detector::Algorithm::oral};

    const auto arl_rows = bench::estimate_arl(cfg);
    bool pass = true;
    std::string detail;
    for (const auto& row : arl_rows) {
        detector::DetectorConfig det = cfg.detector;
        det.threshold = row.threshold;
        const auto rep = theory::calibrate(det, cfg.kernel_p, cfg.kernel_q);
        const double bound = rep.arl_lower;
        if (row.arl.mean < bound - 2.0 * row.arl.se) pass = false;
        char buf[128];
        std::snprintf(buf, sizeof(buf), "c=%.1f: ARL %.0f+-%.0f vs bound %.3f; ",
                      row.threshold, row.arl.mean, row.arl.se, bound);
        detail += buf;
    }
    report(3, "run-length certificate (one-sided)", pass,
           detail + "200 trials, cap 1e5, censored at cap");
}

// ---- C4: delay-bound shape ---------------------------------------------------

void criterion4() {
    auto cfg = base_config();
    cfg.detector.sigma = 0.35;
    cfg.thresholds = {1.0, 2.0, 4.0};

    const auto rows35 = bench::estimate_add(cfg);
    std::vector<double> cs, adds;
    for (const auto& r : rows35) {
        cs.push_back(r.threshold);
        adds.push_back(r.add.mean);
    }
    const LinearFit fit = fit_line(cs, adds);
    const bool linear = fit.r2 >= 0.95 && fit.slope > 0.0;

    cfg.detector.sigma = 0.30;
    cfg.thresholds = {1.0, 2.0, 4.0};
    const auto rows30 = bench::estimate_add(cfg);
    // Larger detectability gap D - sigma must shrink the delay, per threshold.
    bool sigma_monotone = true;
    for (std::size_t i = 0; i < rows30.size(); ++i)
        if (rows30[i].add.mean >= rows35[i].add.mean) sigma_monotone = false;

    char detail[256];
    std::snprintf(detail, sizeof(detail),
                  "ADD(c) R^2 = %.4f slope %.1f (c in {1,2,4}); ADD at sigma 0.30 < "
                  "0.35 at every c: %s",
                  fit.r2, fit.slope, sigma_monotone ? "yes" : "no");
    report(4, "delay grows affinely in c, shrinks with detectability gap",
           linear && sigma_monotone, detail);
}

// ---- C5: directional reproduction -------------------------------------------

void criterion5() {
    auto cfg = base_config();
    cfg.detector.sigma = 0.3;

    // Six-point sweep for the linearity fit; the first four thresholds
    // (run lengths ~70..850 samples, censoring-free) are the matched
    // comparison points.
    cfg.algorithms = {detector::Algorithm::oral};
    cfg.thresholds = {0.1, 0.2, 0.3, 0.4, 0.625, 0.875};
    const auto oral_arl = bench::estimate_arl(cfg);
    const auto oral_add = bench::estimate_add(cfg);

    cfg.algorithms = {detector::Algorithm::ral};
    cfg.thresholds = {0.5, 1.0, 2.0, 3.0};
    const auto ral_arl = bench::estimate_arl(cfg);
    const auto ral_add = bench::estimate_add(cfg);

    std::vector<double> o_logarl, o_add, r_logarl, r_add;
    for (std::size_t i = 0; i < oral_arl.size(); ++i) {
        o_logarl.push_back(std::log(oral_arl[i].arl.mean));
        o_add.push_back(oral_add[i].add.mean);
    }
    for (std::size_t i = 0; i < ral_arl.size(); ++i) {
        r_logarl.push_back(std::log(ral_arl[i].arl.mean));
        r_add.push_back(ral_add[i].add.mean);
    }

    const LinearFit fit = fit_line(o_logarl, o_add);
    const bool linear = fit.r2 >= 0.95 && fit.slope > 0.0;

    // Matched-run-length comparison at the non-overlapping detector's grid
    // points, with the sliding-window curve interpolated in log(ARL).
    int wins = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        const double ral_at = interpolate(r_logarl, r_add, o_logarl[i]);
        if (o_add[i] <= ral_at) ++wins;
    }
    const bool dominates = wins >= 3;

    char detail[256];
    std::snprintf(detail, sizeof(detail),
                  "ADD vs log(ARL) R^2 = %.4f over 6 thresholds; oral ADD <= ral ADD "
                  "at %d/4 matched points (match span ARL %.0f..%.0f)",
                  fit.r2, wins, std::exp(o_logarl[0]), std::exp(o_logarl[3]));
    report(5, "joint sweep reproduces the qualitative comparison", linear && dominates,
           detail);
}

// ---- C6: complexity claim ----------------------------------------------------

void criterion6() {
    auto cfg = base_config();
    cfg.algorithms = {detector::Algorithm::oral, detector::Algorithm::ral};
    const std::uint64_t m = cfg.detector.m;
    const std::uint64_t n = 100 * m;
    const auto rows = bench::complexity_profile(cfg, {n});

    std::uint64_t oral_calls = 0, ral_calls = 0;
    for (const auto& r : rows)
        (r.algorithm == detector::Algorithm::oral ? oral_calls : ral_calls) = r.kernel_calls;

    const double ratio = static_cast<double>(ral_calls) / static_cast<double>(oral_calls);
    const std::uint64_t oral_budget = 3 * (m - 1) * (m - 1) * ((n + m - 1) / m);
    const bool pass = ratio >= 8.0 && ratio <= 12.0 && oral_calls <= oral_budget;

    char detail[192];
    std::snprintf(detail, sizeof(detail),
                  "ral/oral call ratio %.2f at n=100m (want [8,12]); oral calls %llu <= "
                  "budget %llu",
                  ratio, static_cast<unsigned long long>(oral_calls),
                  static_cast<unsigned long long>(oral_budget));
    report(6, "kernel-call complexity", pass, detail);
}

// ---- C7: invariant suites ----------------------------------------------------

void criterion7() {
    bool pass = true;
    std::string failed;

    // MMD metric axioms on random discrete blocks.
    {
        rng::Xoshiro256pp g(71);
        for (int rep = 0; rep < 200; ++rep) {
            mmd::BlockPair b;
            const std::size_t m = 3 + g.next() % 20;
            b.x_pairs.resize(m - 1);
            b.y_pairs.resize(m - 1);
            for (auto& pr : b.x_pairs)
                pr = {static_cast<double>(g.next() % 4), static_cast<double>(g.next() % 4)};
            for (auto& pr : b.y_pairs)
                pr = {static_cast<double>(g.next() % 4), static_cast<double>(g.next() % 4)};
            const double d = mmd::block_mmd(kUnit, b);
            std::swap(b.x_pairs, b.y_pairs);
            const double d2 = mmd::block_mmd(kUnit, b);
            if (d < 0.0 || d > std::sqrt(2.0) + 1e-12 || std::abs(d - d2) > 1e-12) {
                pass = false;
                failed += "metric-axioms ";
                break;
            }
        }
        mmd::BlockPair same;
        same.x_pairs.assign(9, {1, 2});
        same.y_pairs = same.x_pairs;
        if (mmd::block_mmd(kUnit, same) != 0.0) {
            pass = false;
            failed += "identity ";
        }
    }

    // CuSum recursion vs brute force over 1000 random score sequences.
    {
        rng::Xoshiro256pp g(72);
        for (int rep = 0; rep < 1000; ++rep) {
            const std::size_t len = 1 + g.next() % 50;
            std::vector<double> s(len);
            for (auto& v : s) v = 2.0 * g.uniform01() - 1.0;
            double w = 0.0;
            for (double v : s) w = std::max(0.0, w + v);
            if (std::abs(w - oracles::brute_force_cusum(s)) > 1e-12) {
                pass = false;
                failed += "cusum-recursion ";
                break;
            }
        }
    }

    // Radicand clamping.
    {
        mmd::BlockPair b;
        b.x_pairs.assign(150, {0.1234567890123, 7.654321098765});
        b.y_pairs = b.x_pairs;
        std::reverse(b.y_pairs.begin(), b.y_pairs.end());
        const double d = mmd::block_mmd(kUnit, b);
        if (!(d >= 0.0) || d > 1e-6) {
            pass = false;
            failed += "radicand-clamp ";
        }
    }

    // Stationary residual below 1e-12 for both chains.
    for (const auto& chain : {chains::bench_p(), chains::bench_q()}) {
        const auto pi = markov::stationary(chain);
        for (std::size_t j = 0; j < chain.n_states(); ++j) {
            double col = 0.0;
            for (std::size_t i = 0; i < chain.n_states(); ++i)
                col += pi[i] * chain.rows(i, j);
            if (std::abs(col - pi[j]) > 1e-12) {
                pass = false;
                failed += "stationary-residual ";
            }
        }
    }

    // Appendix constants vs hand values at (R=1, lambda=0.5), 1e-3 relative.
    {
        const auto c = theory::appendix_constants(1.0, 0.5, 10);
        auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
        if (c.zeta != 2 || rel(c.eta, 0.5) > 1e-3 || rel(c.chi, 2.18766) > 1e-3 ||
            rel(c.u, 0.73880) > 1e-3 || rel(c.big_m, 11.5402) > 1e-3) {
            pass = false;
            failed += "appendix-hand-values ";
        }
    }

    // solve_q vs a 1e6-point grid scan, 1e-6.
    {
        auto grid_scan = [](double gamma, double h, double hi) {
            double best = 0.0;
            for (int i = 1; i <= 1000000; ++i) {
                const double q = hi * i / 1000000.0;
                if (theory::phi(q, gamma, h) <= 1.0) best = q;
            }
            return best;
        };
        const double q1 = theory::solve_q(1.0, 2.0);
        const double q2 = theory::solve_q(0.5, 1.0);
        if (std::abs(q1 - grid_scan(1.0, 2.0, 4.0)) > 1e-5 ||
            std::abs(q2 - grid_scan(0.5, 1.0, 1.0)) > 1e-5) {
            pass = false;
            failed += "solve_q-grid ";
        }
    }

    // Bit-identical rerun of a seeded sweep.
    {
        bench::ExperimentConfig cfg = base_config();
        cfg.detector.m = 6;
        cfg.trials = 6;
        cfg.max_samples = 3000;
        cfg.thresholds = {0.3, 0.8};
        cfg.sigmas = {0.3};
        cfg.algorithms = {detector::Algorithm::oral, detector::Algorithm::ral};
        const auto dir_a = std::filesystem::temp_directory_path() / "qcd_acc_rerun_a";
        const auto dir_b = std::filesystem::temp_directory_path() / "qcd_acc_rerun_b";
        std::filesystem::remove_all(dir_a);
        std::filesystem::remove_all(dir_b);
        bench::sweep_and_emit(cfg, dir_a);
        bench::sweep_and_emit(cfg, dir_b);
        if (io::read_text_file(dir_a / "add_vs_logarl.csv") !=
            io::read_text_file(dir_b / "add_vs_logarl.csv")) {
            pass = false;
            failed += "bit-identical-rerun ";
        }
        std::filesystem::remove_all(dir_a);
        std::filesystem::remove_all(dir_b);
    }

    report(7, "invariant suites", pass,
           pass ? "metric axioms, recursion=batch, clamping, stationary residual, "
                  "appendix hand values, solve_q grid, bit-identical rerun"
                : "failed: " + failed);
}

// ---- C8: same stationary law, different kernels -------------------------------

void criterion8() {
    const auto p = chains::circulant(0.1, 0.8, 0.1);
    const auto q = chains::circulant(0.8, 0.1, 0.1);
    const double d = mmd::population_mmd(kUnit, markov::pair_measure(p),
                                         markov::pair_measure(q));

    detector::DetectorConfig det;
    det.m = 10;
    det.sigma = d / 2.0;
    det.threshold = 1.0;
    det.kernel = kUnit;

    const auto pi = markov::stationary(p);
    std::vector<double> alarms;
    for (int trial = 0; trial < 50; ++trial) {
        markov::StreamSampler x(p, q, 1, rng::derive_stream_seed(808, 2 * trial), pi);
        markov::StreamSampler y(p, p, std::nullopt, rng::derive_stream_seed(808, 2 * trial + 1),
                                pi);
        const auto out = detector::run_to_alarm(det, x, y, 20000, detector::Algorithm::oral);
        alarms.push_back(out.alarm_index ? static_cast<double>(*out.alarm_index) : 20000.0);
    }
    std::sort(alarms.begin(), alarms.end());
    const double median = alarms[alarms.size() / 2];
    const bool pass = d > 0.01 && median < 10000.0;

    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "uniform-pi circulants: D(F_P,F_Q) = %.4f > 0.01; median alarm %.0f "
                  "samples (50 trials, sigma = D/2)",
                  d, median);
    report(8, "same stationary law is still detectable", pass, detail);
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);
    using Fn = void (*)();
    const Fn criteria[] = {criterion1, criterion2, criterion3, criterion4,
                           criterion5, criterion6, criterion7, criterion8};
    for (int i = 0; i < 8; ++i)
        if (only == 0 || only == i + 1) criteria[i]();
    if (g_failures == 0)
        std::printf("acceptance: all criteria passed\n");
    else
        std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
    return g_failures;
}
