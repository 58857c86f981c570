#pragma once

// ICSS and OLS (quantile method) change-point detectors on a CSS trace, and
// the orientation-corrected pipeline for robust traces.
//
// Index convention: change_point is the detector's raw argmax/argmin index n
// (1-based). On a clean trace this is the last index of the first regime; the
// bench module compares it against (true change point - 1).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "robustcp/css.hpp"
#include "robustcp/error.hpp"

namespace robustcp {

enum class Method { Icss, Ols };

inline std::string to_string(Method m) { return m == Method::Icss ? "ICSS" : "OLS"; }

// "ICSS", "ICSS[BMID]", "OLS[QCV]", ...
inline std::string method_label(Method m, const ScaleEstimatorSpec& spec) {
    switch (spec.kind) {
    case EstimatorKind::Classical: return to_string(m);
    case EstimatorKind::Bmid: return to_string(m) + "[BMID]";
    case EstimatorKind::Qcv: return to_string(m) + "[QCV]";
    }
    return to_string(m);
}

struct DetectionResult {
    std::size_t change_point = 0;
    Method method = Method::Icss;
    ScaleEstimatorSpec estimator{};
    // ICSS: S_1..S_N. OLS: S_1..S_{N-1}; S_1 and S_{N-1} are computed with a
    // one-point segment but are not candidates.
    std::vector<double> statistic_trace;
    double statistic_at_cp = 0.0;
    bool reversed_applied = false;
    bool constant_prefix_fallback = false;
    std::optional<Orientation> orientation;
    // The CSS trace the detector actually ran on (reversed if reversed_applied).
    CssTrace css;
};

/// S_n = C_n / C_N - n / N; the change point maximizes |S_n| over n = 2..N-1,
/// smallest index on ties.
inline DetectionResult icss_detect(const CssTrace& trace) {
    const std::size_t n_total = trace.source_length();
    if (n_total < 4) {
        fail(ErrorCode::InsufficientLength, "ICSS needs at least 4 observations");
    }
    const double total = trace.at(n_total);
    if (total == 0.0) {
        fail(ErrorCode::ZeroTotalSumOfSquares, "C_N is zero");
    }
    DetectionResult result;
    result.method = Method::Icss;
    result.estimator = trace.estimator;
    result.statistic_trace.resize(n_total);
    const double dn = static_cast<double>(n_total);
    for (std::size_t n = 1; n <= n_total; ++n) {
        result.statistic_trace[n - 1] = trace.at(n) / total - static_cast<double>(n) / dn;
    }
    std::size_t best = 2;
    double best_abs = -1.0;
    for (std::size_t n = 2; n <= n_total - 1; ++n) {
        const double a = std::abs(result.statistic_trace[n - 1]);
        if (a > best_abs) {
            best_abs = a;
            best = n;
        }
    }
    result.change_point = best;
    result.statistic_at_cp = result.statistic_trace[best - 1];
    result.css = trace;
    return result;
}

namespace detail {

// Running least-squares moments of points (j, C_j), updated one point at a
// time in centered (Welford) form.
struct LineMoments {
    double count = 0.0;
    double mean_x = 0.0;
    double mean_y = 0.0;
    double m2x = 0.0;
    double m2y = 0.0;
    double cxy = 0.0;

    void add(double x, double y) {
        count += 1.0;
        const double dx = x - mean_x;
        const double dy = y - mean_y;
        mean_x += dx / count;
        mean_y += dy / count;
        m2x += dx * (x - mean_x);
        m2y += dy * (y - mean_y);
        cxy += dx * (y - mean_y);
    }

    // Residual sum of squares of the OLS line; 0 for a single point.
    double ssr() const {
        if (count < 2.0 || m2x <= 0.0) {
            return 0.0;
        }
        return std::max(0.0, m2y - cxy * cxy / m2x);
    }
};

} // namespace detail

/// Quantile method: S_n is the summed residual sum of squares of two OLS lines
/// fitted to (j, C_j) for j <= n and j > n. Candidates n = 2..N-2 so both
/// fits have at least two points; smallest index on ties. O(N) overall.
inline DetectionResult ols_detect(const CssTrace& trace) {
    const std::size_t n_total = trace.source_length();
    if (n_total < 6) {
        fail(ErrorCode::InsufficientLength, "OLS detection needs at least 6 observations");
    }
    // suffix_ssr[n] = SSR of points j = n+1..N
    std::vector<double> suffix_ssr(n_total, 0.0);
    detail::LineMoments back;
    for (std::size_t j = n_total; j >= 2; --j) {
        back.add(static_cast<double>(j), trace.at(j));
        suffix_ssr[j - 1] = back.ssr();
    }
    DetectionResult result;
    result.method = Method::Ols;
    result.estimator = trace.estimator;
    result.statistic_trace.resize(n_total - 1);
    detail::LineMoments front;
    for (std::size_t n = 1; n <= n_total - 1; ++n) {
        front.add(static_cast<double>(n), trace.at(n));
        result.statistic_trace[n - 1] = front.ssr() + suffix_ssr[n];
    }
    std::size_t best = 2;
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t n = 2; n <= n_total - 2; ++n) {
        const double s = result.statistic_trace[n - 1];
        if (s < best_value) {
            best_value = s;
            best = n;
        }
    }
    result.change_point = best;
    result.statistic_at_cp = best_value;
    result.css = trace;
    return result;
}

inline DetectionResult detect(const CssTrace& trace, Method method) {
    return method == Method::Icss ? icss_detect(trace) : ols_detect(trace);
}

// Maps an index found on the reversed series back to original order.
inline std::size_t map_reversed_index(std::size_t index, std::size_t n_total) noexcept {
    return n_total - index + 1;
}

struct OrientationOptions {
    std::size_t head_len = 6;
    double threshold = 0.05;
    CssMode mode = CssMode::Incremental;
};

/// Orientation-corrected detection:
///  1. build the CSS trace for `spec` on the series as given;
///  2. if that trace is convex, rebuild it on the reversed series;
///  3. if the reversed trace is flat over its head (constant-prefix check),
///     fall back to the original-order trace; the check runs once;
///  4. run the detector, and map the index back when the reversed trace was used.
inline DetectionResult detect_with_orientation(std::span<const double> x, Method method,
                                               const ScaleEstimatorSpec& spec,
                                               const OrientationOptions& opts = {}) {
    if (x.size() < 8) {
        fail(ErrorCode::InsufficientLength, "orientation-corrected detection needs at least 8 observations");
    }
    CssTrace forward = robust_css(x, spec, opts.mode);
    const Orientation orientation = detect_orientation(forward);
    bool reversed = false;
    bool fallback = false;
    CssTrace chosen;
    if (orientation == Orientation::Convex) {
        const std::vector<double> rx = reverse_sample(x);
        CssTrace backward = robust_css(rx, spec, opts.mode);
        backward.reversed = true;
        if (constant_prefix_check(backward, opts.head_len, opts.threshold)) {
            fallback = true;
            chosen = std::move(forward);
        } else {
            reversed = true;
            chosen = std::move(backward);
        }
    } else {
        chosen = std::move(forward);
    }
    DetectionResult result = detect(chosen, method);
    result.orientation = orientation;
    result.reversed_applied = reversed;
    result.constant_prefix_fallback = fallback;
    if (reversed) {
        result.change_point = map_reversed_index(result.change_point, x.size());
    }
    return result;
}

} // namespace robustcp
