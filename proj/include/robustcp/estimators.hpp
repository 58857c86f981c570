#pragma once

// Location and scale estimators, classical and robust, evaluated on a
// contiguous sample.
//
// Public functions validate their input (finite values, minimum length) and
// throw robustcp::Error. The detail:: variants skip validation and are used
// by the prefix scans in css.hpp, which validate the whole series once.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "robustcp/error.hpp"

namespace robustcp {

// Tuning constant of the biweight midvariance weights U_i = (x_i - med) / (c * MAD).
struct BmidConfig {
    double c = 9.0;
};

// Quantile window of the quantile conditional variance; 0 < a < b < 1.
struct QcvBounds {
    double a = 0.1;
    double b = 0.9;
};

// Zero-based half-open index window [lo, hi) into the sorted sample.
struct OrderWindow {
    std::size_t lo = 0;
    std::size_t hi = 0;

    std::size_t size() const noexcept { return hi - lo; }
};

inline void validate_sample(std::span<const double> values, std::size_t min_length, ErrorCode short_code) {
    if (values.size() < min_length) {
        if (values.empty()) {
            fail(ErrorCode::EmptySample, "sample is empty");
        }
        fail(short_code, "sample has " + std::to_string(values.size()) + " values, need at least " +
                             std::to_string(min_length));
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            fail(ErrorCode::NonFiniteValue, "value at position " + std::to_string(i + 1) + " is not finite");
        }
    }
}

inline void validate(const BmidConfig& cfg) {
    if (!(cfg.c > 0.0) || !std::isfinite(cfg.c)) {
        fail(ErrorCode::InvalidParameter, "BMID constant c must be positive");
    }
}

inline void validate(const QcvBounds& bounds) {
    if (!(bounds.a > 0.0 && bounds.a < bounds.b && bounds.b < 1.0)) {
        fail(ErrorCode::InvalidParameter, "QCV bounds must satisfy 0 < a < b < 1");
    }
}

// [floor(n*a), floor(n*b)) in zero-based order-statistic indices, i.e. the
// order statistics floor(n*a)+1 .. floor(n*b) in one-based terms. The small
// slack keeps decimal bounds such as 0.9 from flooring one below an exact
// integer product.
inline OrderWindow qcv_window(std::size_t n, const QcvBounds& bounds) noexcept {
    const auto fl = [n](double q) {
        return static_cast<std::size_t>(std::floor(static_cast<double>(n) * q + 1e-9));
    };
    return {fl(bounds.a), fl(bounds.b)};
}

namespace detail {

inline double mean(std::span<const double> values) {
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    return sum / static_cast<double>(values.size());
}

inline double variance(std::span<const double> values) {
    const double mu = mean(values);
    double ss = 0.0;
    for (double v : values) {
        const double d = v - mu;
        ss += d * d;
    }
    return ss / static_cast<double>(values.size() - 1);
}

inline double middle(double lower, double upper) noexcept { return std::midpoint(lower, upper); }

// Median of a scratch buffer; reorders the buffer.
inline double median_inplace(std::span<double> buf) {
    const std::size_t n = buf.size();
    const std::size_t mid = n / 2;
    std::nth_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(mid), buf.end());
    const double upper = buf[mid];
    if (n % 2 == 1) {
        return upper;
    }
    const double lower = *std::max_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(mid));
    return middle(lower, upper);
}

inline double median(std::span<const double> values) {
    std::vector<double> buf(values.begin(), values.end());
    return median_inplace(buf);
}

// Median absolute deviation around a given center, using `scratch` as buffer.
inline double mad_around(std::span<const double> values, double center, std::vector<double>& scratch) {
    scratch.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        scratch[i] = std::abs(values[i] - center);
    }
    return median_inplace(scratch);
}

// Biweight midvariance given the sample median and the raw MAD.
inline double bmid_given(std::span<const double> values, double med, double mad_value, const BmidConfig& cfg) {
    if (!(mad_value > 0.0)) {
        fail(ErrorCode::DegenerateScale, "MAD is zero, biweight weights are undefined");
    }
    const double scale = cfg.c * mad_value;
    double num = 0.0;
    double den = 0.0;
    for (double x : values) {
        const double d = x - med;
        const double u = d / scale;
        if (std::abs(u) < 1.0) {
            const double u2 = u * u;
            const double w = 1.0 - u2;
            const double w2 = w * w;
            num += d * d * (w2 * w2);
            den += w * (1.0 - 5.0 * u2);
        }
    }
    if (den == 0.0) {
        fail(ErrorCode::DegenerateScale, "biweight denominator vanished");
    }
    return static_cast<double>(values.size()) * num / (den * den);
}

inline double bmid(std::span<const double> values, const BmidConfig& cfg) {
    std::vector<double> scratch(values.begin(), values.end());
    const double med = median_inplace(scratch);
    const double mad_value = mad_around(values, med, scratch);
    return bmid_given(values, med, mad_value, cfg);
}

// Variance of sorted[window] around its own mean, divisor = window size.
inline double window_variance(std::span<const double> sorted, OrderWindow window) {
    const auto part = sorted.subspan(window.lo, window.size());
    const double mu = mean(part);
    double ss = 0.0;
    for (double v : part) {
        const double d = v - mu;
        ss += d * d;
    }
    return ss / static_cast<double>(part.size());
}

inline double qcv(std::span<const double> values, const QcvBounds& bounds) {
    const OrderWindow window = qcv_window(values.size(), bounds);
    if (window.hi <= window.lo || window.size() < 2) {
        fail(ErrorCode::WindowTooSmall, "fewer than 2 order statistics in the QCV window for n = " +
                                            std::to_string(values.size()));
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    return window_variance(sorted, window);
}

} // namespace detail

inline double sample_mean(std::span<const double> values) {
    validate_sample(values, 1, ErrorCode::EmptySample);
    return detail::mean(values);
}

// Unbiased sample variance (divisor n - 1).
inline double sample_variance(std::span<const double> values) {
    validate_sample(values, 2, ErrorCode::InsufficientLength);
    return detail::variance(values);
}

// Even lengths return the midpoint of the two central order statistics.
inline double sample_median(std::span<const double> values) {
    validate_sample(values, 1, ErrorCode::EmptySample);
    return detail::median(values);
}

// Raw median absolute deviation from the sample median (no consistency factor).
inline double mad(std::span<const double> values) {
    validate_sample(values, 1, ErrorCode::EmptySample);
    std::vector<double> scratch;
    return detail::mad_around(values, detail::median(values), scratch);
}

/// Biweight midvariance
///
///   n * sum_{|U_i|<1} (x_i - med)^2 (1 - U_i^2)^4 / (sum_{|U_i|<1} (1 - U_i^2)(1 - 5 U_i^2))^2
///
/// with U_i = (x_i - med) / (c * MAD). Throws DegenerateScale when MAD = 0.
inline double bmid_variance(std::span<const double> values, const BmidConfig& cfg = {}) {
    validate(cfg);
    validate_sample(values, 2, ErrorCode::InsufficientLength);
    return detail::bmid(values, cfg);
}

/// Quantile conditional variance: the variance (divisor = window size) of the
/// order statistics floor(n*a)+1 .. floor(n*b) around their own mean. No
/// consistency factor is applied, so the result is proportional to, not equal
/// to, the population variance.
inline double qcv_variance(std::span<const double> values, const QcvBounds& bounds = {}) {
    validate(bounds);
    validate_sample(values, 1, ErrorCode::EmptySample);
    return detail::qcv(values, bounds);
}

} // namespace robustcp
