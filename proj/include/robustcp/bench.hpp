#pragma once

// Monte Carlo harness: MAE / boxplot studies over generator grids, wall-time
// scaling studies, and the normalized real-data error.
//
// Every trial series is generated from RandomStream(base_seed, stream) with
// stream = mix(grid-point id, trial). The grid-point id is a hash of the grid
// point's parameters, so reordering or subsetting a grid never changes the
// series any individual trial sees.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "robustcp/css.hpp"
#include "robustcp/detect.hpp"
#include "robustcp/error.hpp"
#include "robustcp/random.hpp"
#include "robustcp/simulate.hpp"

namespace robustcp {

// |truth - detected| / N
inline double normalized_error(std::size_t detected, std::size_t truth, std::size_t length) {
    if (length == 0 || detected < 1 || detected > length || truth < 1 || truth > length) {
        fail(ErrorCode::IndexOutOfRange, "indices must lie in 1..N");
    }
    const double diff = detected > truth ? static_cast<double>(detected - truth) : static_cast<double>(truth - detected);
    return diff / static_cast<double>(length);
}

// ---------------------------------------------------------------------------
// Boxplot summaries

struct BoxplotSummary {
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
    std::vector<double> outliers; // beyond 1.5 IQR from the quartiles
};

// Linear interpolation between order statistics, h = (n - 1) * q.
inline double interpolated_quantile(std::span<const double> sorted, double q) {
    const double h = static_cast<double>(sorted.size() - 1) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline BoxplotSummary summarize_boxplot(std::span<const double> values) {
    if (values.empty()) {
        fail(ErrorCode::EmptyInput, "no detections to summarize");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    BoxplotSummary out;
    out.min = sorted.front();
    out.max = sorted.back();
    out.q1 = interpolated_quantile(sorted, 0.25);
    out.median = interpolated_quantile(sorted, 0.5);
    out.q3 = interpolated_quantile(sorted, 0.75);
    const double iqr = out.q3 - out.q1;
    for (double v : sorted) {
        if (v < out.q1 - 1.5 * iqr || v > out.q3 + 1.5 * iqr) {
            out.outliers.push_back(v);
        }
    }
    return out;
}

inline BoxplotSummary summarize_boxplot(std::span<const std::size_t> detections) {
    std::vector<double> v(detections.begin(), detections.end());
    return summarize_boxplot(std::span<const double>(v));
}

// ---------------------------------------------------------------------------
// Configuration

enum class GeneratorKind { Stable, Mixture };

inline std::string to_string(GeneratorKind k) { return k == GeneratorKind::Stable ? "stable" : "mixture"; }

struct StableGrid {
    std::vector<double> alphas{1.1};
    std::vector<double> gamma2s{3.0};
    double gamma1 = 1.0;
};

struct MixtureGrid {
    std::vector<double> omega2s{2.0};
    // nu values; multiplied by omega2 when nu_relative is set
    std::vector<double> nus{5.0};
    bool nu_relative = true;
    double p = 0.05;
};

struct MethodSpec {
    Method method = Method::Icss;
    ScaleEstimatorSpec estimator{};
    bool orientation = false;
    std::string label;
    // Replaces the detector; used by harness self-tests.
    std::function<std::size_t(const SimulatedSeries&)> custom;

    static MethodSpec standard(Method m, const ScaleEstimatorSpec& est) {
        return {m, est, est.robust(), method_label(m, est), {}};
    }
};

// ICSS, ICSS[BMID], ICSS[QCV], OLS, OLS[BMID], OLS[QCV]
inline std::vector<MethodSpec> table_methods(BmidConfig bmid = {}, QcvBounds qcv = {}) {
    std::vector<MethodSpec> out;
    for (Method m : {Method::Icss, Method::Ols}) {
        out.push_back(MethodSpec::standard(m, ScaleEstimatorSpec::classical()));
        out.push_back(MethodSpec::standard(m, ScaleEstimatorSpec::biweight(bmid)));
        out.push_back(MethodSpec::standard(m, ScaleEstimatorSpec::quantile(qcv)));
    }
    return out;
}

struct BenchConfig {
    GeneratorKind generator = GeneratorKind::Stable;
    StableGrid stable{};
    MixtureGrid mixture{};
    std::vector<MethodSpec> methods = table_methods();
    std::size_t trials = 50;
    std::uint64_t base_seed = 20240101;
    std::vector<std::size_t> lengths{1000};
    // cp = round(length * cp_fraction), clamped to 2..N-1
    double cp_fraction = 0.5;
    std::size_t threads = 1;
    CssMode mode = CssMode::Incremental;
    OrientationOptions orientation{};
};

struct GridPoint {
    GeneratorKind generator = GeneratorKind::Stable;
    double alpha = 0.0;
    double gamma1 = 1.0;
    double gamma2 = 0.0;
    double omega2 = 0.0;
    double nu = 0.0;
    double p = 0.0;
    std::size_t length = 0;
    std::size_t cp = 0;

    std::uint64_t id() const noexcept {
        std::uint64_t h = splitmix64(static_cast<std::uint64_t>(generator) + 1);
        for (double v : {alpha, gamma1, gamma2, omega2, nu, p}) {
            h = splitmix64(h ^ std::bit_cast<std::uint64_t>(v));
        }
        h = splitmix64(h ^ static_cast<std::uint64_t>(length));
        return splitmix64(h ^ static_cast<std::uint64_t>(cp));
    }

    std::string label() const {
        std::ostringstream os;
        if (generator == GeneratorKind::Stable) {
            os << "stable alpha=" << alpha << " gamma2=" << gamma2;
        } else {
            os << "mixture omega2=" << omega2 << " nu=" << nu << " p=" << p;
        }
        os << " N=" << length;
        return os.str();
    }
};

inline std::uint64_t trial_stream(const GridPoint& gp, std::size_t trial) noexcept {
    return mix_seed(gp.id(), static_cast<std::uint64_t>(trial));
}

inline std::size_t change_point_for(std::size_t length, double fraction) {
    auto cp = static_cast<std::size_t>(std::llround(static_cast<double>(length) * fraction));
    return std::clamp<std::size_t>(cp, 2, length - 1);
}

inline void validate(const BenchConfig& cfg) {
    if (cfg.trials < 1) {
        fail(ErrorCode::ConfigError, "trials must be at least 1");
    }
    if (cfg.lengths.empty()) {
        fail(ErrorCode::ConfigError, "no series lengths given");
    }
    if (cfg.methods.empty()) {
        fail(ErrorCode::ConfigError, "no methods given");
    }
    for (std::size_t n : cfg.lengths) {
        if (n < 8) {
            fail(ErrorCode::ConfigError, "series length must be at least 8");
        }
    }
    if (!(cfg.cp_fraction > 0.0 && cfg.cp_fraction < 1.0)) {
        fail(ErrorCode::ConfigError, "cp_fraction must lie in (0, 1)");
    }
    if (cfg.generator == GeneratorKind::Stable && (cfg.stable.alphas.empty() || cfg.stable.gamma2s.empty())) {
        fail(ErrorCode::ConfigError, "stable grid needs alphas and gamma2s");
    }
    if (cfg.generator == GeneratorKind::Mixture && (cfg.mixture.omega2s.empty() || cfg.mixture.nus.empty())) {
        fail(ErrorCode::ConfigError, "mixture grid needs omega2s and nus");
    }
}

inline std::vector<GridPoint> grid_points(const BenchConfig& cfg) {
    std::vector<GridPoint> out;
    for (std::size_t length : cfg.lengths) {
        const std::size_t cp = change_point_for(length, cfg.cp_fraction);
        if (cfg.generator == GeneratorKind::Stable) {
            for (double alpha : cfg.stable.alphas) {
                for (double g2 : cfg.stable.gamma2s) {
                    GridPoint gp;
                    gp.generator = GeneratorKind::Stable;
                    gp.alpha = alpha;
                    gp.gamma1 = cfg.stable.gamma1;
                    gp.gamma2 = g2;
                    gp.length = length;
                    gp.cp = cp;
                    validate(StableSpec{alpha, gp.gamma1, g2, length, cp, 0, 0});
                    out.push_back(gp);
                }
            }
        } else {
            for (double ratio : cfg.mixture.nus) {
                for (double w2 : cfg.mixture.omega2s) {
                    GridPoint gp;
                    gp.generator = GeneratorKind::Mixture;
                    gp.omega2 = w2;
                    gp.nu = cfg.mixture.nu_relative ? ratio * w2 : ratio;
                    gp.p = cfg.mixture.p;
                    gp.length = length;
                    gp.cp = cp;
                    MixtureSpec ms;
                    ms.omega2 = w2;
                    ms.nu = gp.nu;
                    ms.p = gp.p;
                    ms.length = length;
                    ms.cp = cp;
                    validate(ms);
                    out.push_back(gp);
                }
            }
        }
    }
    return out;
}

inline SimulatedSeries generate(const GridPoint& gp, std::uint64_t base_seed, std::size_t trial) {
    const std::uint64_t stream = trial_stream(gp, trial);
    if (gp.generator == GeneratorKind::Stable) {
        return gen_stable_series({gp.alpha, gp.gamma1, gp.gamma2, gp.length, gp.cp, base_seed, stream});
    }
    MixtureSpec ms;
    ms.omega2 = gp.omega2;
    ms.nu = gp.nu;
    ms.p = gp.p;
    ms.length = gp.length;
    ms.cp = gp.cp;
    ms.seed = base_seed;
    ms.stream = stream;
    return gen_mixture_series(ms);
}

inline std::size_t run_method(const MethodSpec& m, const SimulatedSeries& series, const BenchConfig& cfg) {
    if (m.custom) {
        return m.custom(series);
    }
    if (m.orientation) {
        OrientationOptions opts = cfg.orientation;
        opts.mode = cfg.mode;
        return detect_with_orientation(series.values, m.method, m.estimator, opts).change_point;
    }
    const CssTrace trace = m.estimator.robust() ? robust_css(series.values, m.estimator, cfg.mode)
                                                : classical_css(series.values);
    return detect(trace, m.method).change_point;
}

// ---------------------------------------------------------------------------
// MAE study

struct MethodOutcome {
    std::string label;
    // per-trial raw detections; empty when the trial failed
    std::vector<std::optional<std::size_t>> detections;
    std::vector<std::string> failure_messages;
    std::size_t failures = 0;
    // mean |detected - (cp - 1)| over successful trials; NaN if none succeeded
    double mae = std::numeric_limits<double>::quiet_NaN();
    std::optional<BoxplotSummary> boxplot;
};

struct GridResult {
    GridPoint point;
    std::vector<std::uint64_t> streams; // per trial
    std::vector<MethodOutcome> methods;

    const MethodOutcome& method(const std::string& label) const {
        for (const auto& m : methods) {
            if (m.label == label) {
                return m;
            }
        }
        fail(ErrorCode::InvalidParameter, "no method labelled " + label);
    }
};

struct BenchReport {
    std::uint64_t base_seed = 0;
    std::size_t trials = 0;
    std::vector<std::string> method_labels;
    std::vector<GridResult> results;
};

// Ground truth the raw detector index is compared against: the last index of
// the first regime.
inline std::size_t detector_truth(std::size_t cp) noexcept { return cp - 1; }

namespace detail {

template <typename Fn>
void for_each_trial(std::size_t trials, std::size_t threads, Fn&& fn) {
    threads = std::max<std::size_t>(1, std::min(threads, trials));
    if (threads == 1) {
        for (std::size_t t = 0; t < trials; ++t) {
            fn(t);
        }
        return;
    }
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
        workers.emplace_back([&, w] {
            for (std::size_t t = w; t < trials; t += threads) {
                fn(t);
            }
        });
    }
}

} // namespace detail

inline BenchReport run_mae_study(const BenchConfig& cfg) {
    validate(cfg);
    BenchReport report;
    report.base_seed = cfg.base_seed;
    report.trials = cfg.trials;
    for (const auto& m : cfg.methods) {
        report.method_labels.push_back(m.label);
    }
    for (const GridPoint& gp : grid_points(cfg)) {
        GridResult gr;
        gr.point = gp;
        gr.streams.resize(cfg.trials);
        gr.methods.resize(cfg.methods.size());
        for (std::size_t k = 0; k < cfg.methods.size(); ++k) {
            gr.methods[k].label = cfg.methods[k].label;
            gr.methods[k].detections.resize(cfg.trials);
            gr.methods[k].failure_messages.resize(cfg.trials);
        }
        detail::for_each_trial(cfg.trials, cfg.threads, [&](std::size_t t) {
            gr.streams[t] = trial_stream(gp, t);
            const SimulatedSeries series = generate(gp, cfg.base_seed, t);
            for (std::size_t k = 0; k < cfg.methods.size(); ++k) {
                try {
                    gr.methods[k].detections[t] = run_method(cfg.methods[k], series, cfg);
                } catch (const Error& e) {
                    gr.methods[k].failure_messages[t] = e.what();
                }
            }
        });
        const double truth = static_cast<double>(detector_truth(gp.cp));
        for (auto& outcome : gr.methods) {
            std::vector<double> ok;
            double abs_sum = 0.0;
            for (const auto& d : outcome.detections) {
                if (d) {
                    ok.push_back(static_cast<double>(*d));
                    abs_sum += std::abs(static_cast<double>(*d) - truth);
                } else {
                    ++outcome.failures;
                }
            }
            if (!ok.empty()) {
                outcome.mae = abs_sum / static_cast<double>(ok.size());
                outcome.boxplot = summarize_boxplot(std::span<const double>(ok));
            }
        }
        report.results.push_back(std::move(gr));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Timing study

struct TimingRow {
    std::size_t length = 0;
    std::string label;
    std::size_t trials = 0;
    double median_seconds = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::vector<double> seconds;
};

struct ScalingFit {
    std::string label;
    double exponent = 0.0;  // beta in time ~ c * N^beta
    double log_coef = 0.0;  // ln c
};

struct TimingReport {
    std::uint64_t base_seed = 0;
    std::vector<TimingRow> rows;
    std::vector<ScalingFit> fits;

    const ScalingFit& fit(const std::string& label) const {
        for (const auto& f : fits) {
            if (f.label == label) {
                return f;
            }
        }
        fail(ErrorCode::InvalidParameter, "no fit for " + label);
    }
    const TimingRow& row(std::size_t length, const std::string& label) const {
        for (const auto& r : rows) {
            if (r.length == length && r.label == label) {
                return r;
            }
        }
        fail(ErrorCode::InvalidParameter, "no timing row for " + label);
    }
};

/// Distribution-free confidence interval for the median from order
/// statistics: returns zero-based ranks (lo, hi) such that
/// P(X_(lo) <= median <= X_(hi)) >= level under Binomial(n, 1/2).
inline std::pair<std::size_t, std::size_t> median_ci_ranks(std::size_t n, double level = 0.95) {
    if (n == 0) {
        fail(ErrorCode::EmptyInput, "no samples");
    }
    const double tail = (1.0 - level) / 2.0;
    // cdf[k] = P(B <= k)
    std::vector<double> pmf(n + 1);
    const double log_half_n = static_cast<double>(n) * std::log(0.5);
    for (std::size_t k = 0; k <= n; ++k) {
        pmf[k] = std::exp(std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
                          std::lgamma(static_cast<double>(n - k) + 1.0) + log_half_n);
    }
    // Largest one-based j with P(B <= j - 1) <= tail; interval [X_(j), X_(n-j+1)].
    std::size_t j = 1;
    double cdf = 0.0;
    for (std::size_t cand = 1; cand <= n; ++cand) {
        cdf += pmf[cand - 1];
        if (cdf <= tail) {
            j = cand;
        } else {
            break;
        }
    }
    j = std::min(j, (n + 1) / 2);
    return {j - 1, n - j};
}

// Least-squares slope/intercept of ln(time) on ln(N).
inline ScalingFit fit_power_law(const std::string& label, std::span<const std::size_t> lengths,
                                std::span<const double> seconds) {
    std::set<std::size_t> distinct(lengths.begin(), lengths.end());
    if (distinct.size() < 2 || lengths.size() != seconds.size()) {
        fail(ErrorCode::ConfigError, "power-law fit needs at least two distinct lengths");
    }
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        mx += std::log(static_cast<double>(lengths[i]));
        my += std::log(std::max(seconds[i], 1e-12));
    }
    mx /= static_cast<double>(lengths.size());
    my /= static_cast<double>(lengths.size());
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        const double dx = std::log(static_cast<double>(lengths[i])) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(std::max(seconds[i], 1e-12)) - my);
    }
    ScalingFit fit;
    fit.label = label;
    fit.exponent = sxy / sxx;
    fit.log_coef = my - fit.exponent * mx;
    return fit;
}

inline void validate_timing_lengths(std::span<const std::size_t> lengths) {
    const std::set<std::size_t> distinct(lengths.begin(), lengths.end());
    if (distinct.size() < 5) {
        fail(ErrorCode::ConfigError, "timing study needs at least 5 distinct lengths");
    }
    if (static_cast<double>(*distinct.rbegin()) < 10.0 * static_cast<double>(*distinct.begin())) {
        fail(ErrorCode::ConfigError, "timing lengths must span at least one decade");
    }
}

/// Median wall time of detection only (generation excluded) per (N, method).
/// Each (N, method) cell runs one discarded warm-up detection first. Trials
/// run sequentially regardless of cfg.threads.
inline TimingReport run_timing_study(const BenchConfig& cfg) {
    validate(cfg);
    validate_timing_lengths(cfg.lengths);
    TimingReport report;
    report.base_seed = cfg.base_seed;
    const std::vector<GridPoint> points = grid_points(cfg);
    for (const GridPoint& gp : points) {
        std::vector<SimulatedSeries> series;
        series.reserve(cfg.trials);
        for (std::size_t t = 0; t < cfg.trials; ++t) {
            series.push_back(generate(gp, cfg.base_seed, t));
        }
        for (const MethodSpec& m : cfg.methods) {
            TimingRow row;
            row.length = gp.length;
            row.label = m.label;
            row.trials = cfg.trials;
            volatile std::size_t sink = run_method(m, series.front(), cfg);
            for (const SimulatedSeries& s : series) {
                const auto start = std::chrono::steady_clock::now();
                sink = run_method(m, s, cfg);
                const auto stop = std::chrono::steady_clock::now();
                row.seconds.push_back(std::chrono::duration<double>(stop - start).count());
            }
            (void)sink;
            std::vector<double> sorted = row.seconds;
            std::sort(sorted.begin(), sorted.end());
            row.median_seconds = interpolated_quantile(sorted, 0.5);
            const auto [lo, hi] = median_ci_ranks(sorted.size());
            row.ci_low = sorted[lo];
            row.ci_high = sorted[hi];
            report.rows.push_back(std::move(row));
        }
    }
    for (const MethodSpec& m : cfg.methods) {
        std::vector<std::size_t> ns;
        std::vector<double> ts;
        for (const auto& r : report.rows) {
            if (r.label == m.label) {
                ns.push_back(r.length);
                ts.push_back(r.median_seconds);
            }
        }
        report.fits.push_back(fit_power_law(m.label, ns, ts));
    }
    return report;
}

} // namespace robustcp
