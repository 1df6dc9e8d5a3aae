// Dev-only probe: prints (c, ARL, ADD) curves for both detectors so sweep
// grids can be chosen sensibly. Not registered with ctest.

#include <cstdio>
#include <cstdlib>

#include "qcd/bench.hpp"
#include "../support/chains.hpp"

using namespace qcd;

int main(int argc, char** argv) {
    bench::ExperimentConfig cfg;
    cfg.kernel_p = chains::bench_p();
    cfg.kernel_q = chains::bench_q();
    cfg.detector.m = 10;
    cfg.detector.sigma = argc > 1 ? std::atof(argv[1]) : 0.3;
    cfg.trials = argc > 2 ? static_cast<std::size_t>(std::atoi(argv[2])) : 200;
    cfg.max_samples = 100000;
    cfg.seed = 20240901;
    cfg.change_point = 1;

    cfg.algorithms = {detector::Algorithm::oral};
    cfg.thresholds = {0.1, 0.2, 0.3, 0.4, 0.5, 0.625, 0.75, 0.875, 1.0, 1.125};
    auto arl = bench::estimate_arl(cfg);
    auto add = bench::estimate_add(cfg);
    std::printf("oral sigma=%.2f\n  c      arl (cens)      add\n", cfg.detector.sigma);
    for (std::size_t i = 0; i < arl.size(); ++i)
        std::printf("  %-6.3f %-9.0f (%.2f) %-8.2f\n", arl[i].threshold, arl[i].arl.mean,
                    arl[i].arl.censor_rate, add[i].add.mean);

    cfg.algorithms = {detector::Algorithm::ral};
    cfg.thresholds = {0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0};
    arl = bench::estimate_arl(cfg);
    add = bench::estimate_add(cfg);
    std::printf("ral sigma=%.2f\n  c      arl (cens)      add\n", cfg.detector.sigma);
    for (std::size_t i = 0; i < arl.size(); ++i)
        std::printf("  %-6.3f %-9.0f (%.2f) %-8.2f\n", arl[i].threshold, arl[i].arl.mean,
                    arl[i].arl.censor_rate, add[i].add.mean);
    return 0;
}
