#pragma once

// Named bench configurations. The "-desk" variants are the reduced grids
// (50 trials) that fit in a CI run; the others are the full published grids
// with 100 trials.

#include <string>
#include <vector>

#include "robustcp/bench.hpp"
#include "robustcp/error.hpp"

namespace robustcp::presets {

inline const std::vector<double>& published_scales() {
    static const std::vector<double> scales{0.2, 0.25, 0.33, 0.5, 2.0, 3.0, 4.0, 5.0};
    return scales;
}

// Lengths of the published timing study.
inline const std::vector<std::size_t>& published_timing_lengths() {
    static const std::vector<std::size_t> lengths{40,  50,  60,  70,  100, 200, 250, 300, 350,  400,  450,  500, 550,
                                                  600, 650, 700, 750, 800, 850, 900, 950, 1000, 1500, 2000, 5000};
    return lengths;
}

inline BenchConfig stable_table(bool desk) {
    BenchConfig cfg;
    cfg.generator = GeneratorKind::Stable;
    cfg.stable.alphas = {1.1, 1.9, 2.0};
    cfg.stable.gamma2s = desk ? std::vector<double>{0.2, 3.0, 5.0} : published_scales();
    cfg.trials = desk ? 50 : 100;
    cfg.lengths = {1000};
    return cfg;
}

inline BenchConfig mixture_table(bool desk) {
    BenchConfig cfg;
    cfg.generator = GeneratorKind::Mixture;
    cfg.mixture.nus = {1.5, 5.0};
    cfg.mixture.nu_relative = true;
    cfg.mixture.p = 0.05;
    cfg.mixture.omega2s = desk ? std::vector<double>{0.5, 2.0, 5.0} : published_scales();
    cfg.trials = desk ? 50 : 100;
    cfg.lengths = {1000};
    return cfg;
}

// Mixture model with nu = 15, omega2 = 5, p = 0.05, robust methods only.
inline BenchConfig mixture_timing(bool desk) {
    BenchConfig cfg;
    cfg.generator = GeneratorKind::Mixture;
    cfg.mixture.omega2s = {5.0};
    cfg.mixture.nus = {15.0};
    cfg.mixture.nu_relative = false;
    cfg.mixture.p = 0.05;
    cfg.methods.clear();
    for (Method m : {Method::Icss, Method::Ols}) {
        cfg.methods.push_back(MethodSpec::standard(m, ScaleEstimatorSpec::biweight()));
        cfg.methods.push_back(MethodSpec::standard(m, ScaleEstimatorSpec::quantile()));
    }
    cfg.trials = desk ? 5 : 100;
    cfg.lengths = desk ? std::vector<std::size_t>{100, 200, 500, 1000, 2000, 5000} : published_timing_lengths();
    return cfg;
}

inline std::vector<std::string> names() {
    return {"paper-table4-desk", "paper-table4", "paper-table5-desk", "paper-table5", "paper-timing-desk",
            "paper-timing"};
}

inline BenchConfig by_name(const std::string& name) {
    if (name == "paper-table4-desk") return stable_table(true);
    if (name == "paper-table4") return stable_table(false);
    if (name == "paper-table5-desk") return mixture_table(true);
    if (name == "paper-table5") return mixture_table(false);
    if (name == "paper-timing-desk") return mixture_timing(true);
    if (name == "paper-timing") return mixture_timing(false);
    fail(ErrorCode::ConfigError, "unknown preset '" + name + "'");
}

} // namespace robustcp::presets
