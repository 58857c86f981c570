#pragma once

// Cumulative-sum-of-squares statistics over every prefix of a series.
//
// classical_css emits C_n = sum_{i<=n} x_i^2. robust_css emits
//
//   C_{r,n} = n * (var_n + loc_n^2) - var_n
//
// where (var_n, loc_n) are a scale/location estimator pair evaluated on the
// prefix x_1..x_n. With the classical pair (unbiased variance, mean) this is
// an exact rewrite of C_n; the robust kinds swap in the sample median and the
// biweight midvariance or the quantile conditional variance.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "robustcp/error.hpp"
#include "robustcp/estimators.hpp"
#include "robustcp/order_statistics.hpp"

namespace robustcp {

enum class EstimatorKind { Classical, Bmid, Qcv };
enum class LocationKind { Mean, Median };

struct ScaleEstimatorSpec {
    EstimatorKind kind = EstimatorKind::Classical;
    BmidConfig bmid{};
    QcvBounds qcv{};

    static ScaleEstimatorSpec classical() { return {}; }
    static ScaleEstimatorSpec biweight(BmidConfig cfg = {}) { return {EstimatorKind::Bmid, cfg, {}}; }
    static ScaleEstimatorSpec quantile(QcvBounds bounds = {}) { return {EstimatorKind::Qcv, {}, bounds}; }

    // Robust scale kinds always pair with the median.
    LocationKind location() const noexcept {
        return kind == EstimatorKind::Classical ? LocationKind::Mean : LocationKind::Median;
    }
    bool robust() const noexcept { return kind != EstimatorKind::Classical; }
};

inline std::string to_string(EstimatorKind kind) {
    switch (kind) {
    case EstimatorKind::Classical: return "classical";
    case EstimatorKind::Bmid: return "bmid";
    case EstimatorKind::Qcv: return "qcv";
    }
    return "unknown";
}

inline std::string to_string(LocationKind kind) { return kind == LocationKind::Mean ? "mean" : "median"; }

inline void validate(const ScaleEstimatorSpec& spec) {
    if (spec.kind == EstimatorKind::Bmid) {
        validate(spec.bmid);
    } else if (spec.kind == EstimatorKind::Qcv) {
        validate(spec.qcv);
    }
}

// Incremental keeps running moments / an order-statistic index across
// prefixes. ExactNaive recomputes every estimator from scratch on every
// prefix and is the reference the incremental path is checked against.
enum class CssMode { Incremental, ExactNaive };

struct CssTrace {
    std::vector<double> values; // values[n - 1] holds C_n
    ScaleEstimatorSpec estimator{};
    bool reversed = false;
    // Prefixes whose robust scale was degenerate (MAD = 0) and replaced by 0.
    std::size_t degenerate_prefixes = 0;

    std::size_t source_length() const noexcept { return values.size(); }
    double at(std::size_t n) const { return values.at(n - 1); }
    bool degenerate_scale_warning() const noexcept { return degenerate_prefixes > 0; }
};

inline CssTrace classical_css(std::span<const double> x) {
    validate_sample(x, 1, ErrorCode::EmptySample);
    CssTrace trace;
    trace.values.resize(x.size());
    double running = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        running += x[i] * x[i];
        trace.values[i] = running;
    }
    return trace;
}

namespace detail {

inline double css_entry(std::size_t n, double var, double loc) {
    const double dn = static_cast<double>(n);
    return dn * (var + loc * loc) - var;
}

// QCV window for a prefix of length n; prefixes too short for the requested
// bounds fall back to the whole prefix.
inline OrderWindow prefix_qcv_window(std::size_t n, const QcvBounds& bounds) {
    OrderWindow w = qcv_window(n, bounds);
    if (w.hi <= w.lo || w.size() < 2) {
        w = {0, n};
    }
    return w;
}

inline void classical_prefixes(std::span<const double> x, CssMode mode, CssTrace& trace) {
    if (mode == CssMode::ExactNaive) {
        for (std::size_t n = 2; n <= x.size(); ++n) {
            const auto prefix = x.first(n);
            trace.values[n - 1] = css_entry(n, variance(prefix), mean(prefix));
        }
        return;
    }
    // Welford running mean / second moment
    double mu = x[0];
    double m2 = 0.0;
    for (std::size_t n = 2; n <= x.size(); ++n) {
        const double v = x[n - 1];
        const double delta = v - mu;
        mu += delta / static_cast<double>(n);
        m2 += delta * (v - mu);
        trace.values[n - 1] = css_entry(n, m2 / static_cast<double>(n - 1), mu);
    }
}

inline void bmid_prefixes(std::span<const double> x, const BmidConfig& cfg, CssMode mode, CssTrace& trace) {
    std::vector<double> scratch;
    OrderStatisticIndex index(mode == CssMode::Incremental ? x : std::span<const double>{});
    if (mode == CssMode::Incremental) {
        index.insert(x[0]);
    }
    for (std::size_t n = 2; n <= x.size(); ++n) {
        const auto prefix = x.first(n);
        double med = 0.0;
        double mad_value = 0.0;
        if (mode == CssMode::Incremental) {
            index.insert(x[n - 1]);
            med = index.median();
        } else {
            med = median(prefix);
        }
        mad_value = mad_around(prefix, med, scratch);
        double var = 0.0;
        if (mad_value > 0.0) {
            var = bmid_given(prefix, med, mad_value, cfg);
        } else {
            ++trace.degenerate_prefixes;
        }
        trace.values[n - 1] = css_entry(n, var, med);
    }
}

inline void qcv_prefixes(std::span<const double> x, const QcvBounds& bounds, CssMode mode, CssTrace& trace) {
    if (mode == CssMode::ExactNaive) {
        std::vector<double> sorted;
        for (std::size_t n = 2; n <= x.size(); ++n) {
            const auto prefix = x.first(n);
            sorted.assign(prefix.begin(), prefix.end());
            std::sort(sorted.begin(), sorted.end());
            const double var = window_variance(sorted, prefix_qcv_window(n, bounds));
            const double med = n % 2 == 1 ? sorted[n / 2] : middle(sorted[n / 2 - 1], sorted[n / 2]);
            trace.values[n - 1] = css_entry(n, var, med);
        }
        return;
    }
    OrderStatisticIndex index(x);
    index.insert(x[0]);
    for (std::size_t n = 2; n <= x.size(); ++n) {
        index.insert(x[n - 1]);
        const WindowMoments m = index.window_moments(prefix_qcv_window(n, bounds));
        const double k = static_cast<double>(m.count);
        const double var = std::max(0.0, (m.sum_sq - m.sum * m.sum / k) / k);
        trace.values[n - 1] = css_entry(n, var, index.median());
    }
}

} // namespace detail

/// Robust CSS trace over every prefix. Entry n = 1 is x_1^2. A prefix whose
/// MAD is zero (BMID only) contributes variance 0 and is counted in
/// `degenerate_prefixes` instead of aborting the scan.
inline CssTrace robust_css(std::span<const double> x, const ScaleEstimatorSpec& spec,
                           CssMode mode = CssMode::Incremental) {
    validate(spec);
    validate_sample(x, spec.robust() ? 3 : 1, ErrorCode::InsufficientLength);
    CssTrace trace;
    trace.estimator = spec;
    trace.values.resize(x.size());
    trace.values[0] = x[0] * x[0];
    switch (spec.kind) {
    case EstimatorKind::Classical: detail::classical_prefixes(x, mode, trace); break;
    case EstimatorKind::Bmid: detail::bmid_prefixes(x, spec.bmid, mode, trace); break;
    case EstimatorKind::Qcv: detail::qcv_prefixes(x, spec.qcv, mode, trace); break;
    }
    return trace;
}

enum class Orientation { Concave, Convex };

inline std::string to_string(Orientation o) { return o == Orientation::Concave ? "concave" : "convex"; }

/// Compares C_n, n = 2..N-1, with the chord through (2, C_2) and (N-1, C_{N-1}).
/// Concave when strictly more points lie above the chord than below; points on
/// the chord count for neither side and ties resolve to Convex.
inline Orientation detect_orientation(const CssTrace& trace) {
    const std::size_t n_total = trace.source_length();
    if (n_total < 4) {
        fail(ErrorCode::InsufficientLength, "orientation needs at least 4 trace values");
    }
    const double x0 = 2.0;
    const double x1 = static_cast<double>(n_total - 1);
    const double y0 = trace.at(2);
    const double y1 = trace.at(n_total - 1);
    const double slope = (y1 - y0) / (x1 - x0);
    std::size_t above = 0;
    std::size_t below = 0;
    for (std::size_t n = 2; n <= n_total - 1; ++n) {
        const double chord = y0 + slope * (static_cast<double>(n) - x0);
        const double c = trace.at(n);
        if (c > chord) {
            ++above;
        } else if (c < chord) {
            ++below;
        }
    }
    return above > below ? Orientation::Concave : Orientation::Convex;
}

/// True when the trace "behaves like a constant" over its head: fewer than
/// `threshold` of the points n = 2..N-1 exceed the mean of C_2..C_{head_len+1}.
inline bool constant_prefix_check(const CssTrace& trace, std::size_t head_len = 6, double threshold = 0.05) {
    const std::size_t n_total = trace.source_length();
    if (head_len == 0 || n_total < head_len + 2) {
        fail(ErrorCode::InsufficientLength, "constant-prefix check needs at least head_len + 2 trace values");
    }
    double omega = 0.0;
    for (std::size_t n = 2; n <= head_len + 1; ++n) {
        omega += trace.at(n);
    }
    omega /= static_cast<double>(head_len);
    std::size_t exceed = 0;
    for (std::size_t n = 2; n <= n_total - 1; ++n) {
        if (trace.at(n) > omega) {
            ++exceed;
        }
    }
    const double epsilon = static_cast<double>(exceed) / static_cast<double>(n_total - 2);
    return epsilon < threshold;
}

inline std::vector<double> reverse_sample(std::span<const double> x) { return {x.rbegin(), x.rend()}; }

} // namespace robustcp
