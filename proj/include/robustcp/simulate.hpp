#pragma once

// Seeded generators for the two synthetic single-change-point models:
//
//  * symmetric alpha-stable noise whose scale switches from gamma1 to gamma2
//    at the change point;
//  * Gaussian noise (std 1, then omega2) plus random-sign uniform spikes
//    X_n = G_n + U_n * K_n with U_n ~ U(0, nu), P(K = +1) = P(K = -1) = p,
//    P(K = 0) = 1 - 2p.
//
// The change point cp is the 1-based index of the first observation of the
// second regime.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "robustcp/error.hpp"
#include "robustcp/random.hpp"

namespace robustcp {

/// One draw from the symmetric alpha-stable law with characteristic function
/// exp(-gamma^alpha |t|^alpha), by the Chambers-Mallows-Stuck construction.
/// alpha = 1 is the Cauchy branch, alpha = 2 is N(0, 2 gamma^2).
inline double sample_symmetric_stable(double alpha, double gamma, RandomStream& rng) {
    if (!(alpha > 0.0 && alpha <= 2.0)) {
        fail(ErrorCode::InvalidAlpha, "alpha must lie in (0, 2]");
    }
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        fail(ErrorCode::InvalidGamma, "gamma must be positive");
    }
    // Both uniforms are always consumed so every branch advances the stream
    // by the same amount.
    const double u1 = rng.uniform();
    const double u2 = rng.uniform();
    if (alpha == 2.0) {
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        return gamma * std::numbers::sqrt2 * z;
    }
    const double v = std::numbers::pi * (u1 - 0.5);
    if (alpha == 1.0) {
        return gamma * std::tan(v);
    }
    const double w = -std::log(u2);
    const double x = std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
                     std::pow(std::cos(v - alpha * v) / w, (1.0 - alpha) / alpha);
    return gamma * x;
}

struct StableSpec {
    double alpha = 1.5;
    double gamma1 = 1.0;
    double gamma2 = 2.0;
    std::size_t length = 1000;
    std::size_t cp = 500;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

struct MixtureSpec {
    double omega2 = 2.0;
    double nu = 10.0;
    double p = 0.05;
    std::size_t length = 1000;
    std::size_t cp = 500;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    // p = 0 switches the spikes off; only meant for tests.
    bool allow_zero_p = false;
};

struct SimulatedSeries {
    std::vector<double> values;
    std::size_t cp = 0;

    // 1 for indices before cp, 2 from cp on (1-based index).
    int regime(std::size_t index) const noexcept { return index < cp ? 1 : 2; }
};

inline void validate_change_point(std::size_t length, std::size_t cp) {
    if (length < 3 || cp < 2 || cp > length - 1) {
        fail(ErrorCode::InvalidParameter,
             "change point must satisfy 2 <= cp <= N-1 (N = " + std::to_string(length) + ", cp = " +
                 std::to_string(cp) + ")");
    }
}

inline void validate(const StableSpec& spec) {
    if (!(spec.alpha > 0.0 && spec.alpha <= 2.0)) {
        fail(ErrorCode::InvalidAlpha, "alpha must lie in (0, 2]");
    }
    if (!(spec.gamma1 > 0.0) || !(spec.gamma2 > 0.0)) {
        fail(ErrorCode::InvalidGamma, "scales must be positive");
    }
    validate_change_point(spec.length, spec.cp);
}

inline void validate(const MixtureSpec& spec) {
    if (!(spec.omega2 > 0.0) || !std::isfinite(spec.omega2)) {
        fail(ErrorCode::InvalidParameter, "omega2 must be positive");
    }
    if (!(spec.nu > 0.0) || !std::isfinite(spec.nu)) {
        fail(ErrorCode::InvalidParameter, "nu must be positive");
    }
    const bool p_ok = spec.allow_zero_p ? (spec.p >= 0.0 && spec.p < 0.5) : (spec.p > 0.0 && spec.p < 0.5);
    if (!p_ok) {
        fail(ErrorCode::InvalidParameter, "outlier probability p must lie in (0, 0.5)");
    }
    validate_change_point(spec.length, spec.cp);
}

inline SimulatedSeries gen_stable_series(const StableSpec& spec) {
    validate(spec);
    RandomStream rng(spec.seed, spec.stream);
    SimulatedSeries out;
    out.cp = spec.cp;
    out.values.resize(spec.length);
    for (std::size_t i = 1; i <= spec.length; ++i) {
        const double gamma = i < spec.cp ? spec.gamma1 : spec.gamma2;
        out.values[i - 1] = sample_symmetric_stable(spec.alpha, gamma, rng);
    }
    return out;
}

inline SimulatedSeries gen_mixture_series(const MixtureSpec& spec) {
    validate(spec);
    RandomStream rng(spec.seed, spec.stream);
    SimulatedSeries out;
    out.cp = spec.cp;
    out.values.resize(spec.length);
    for (std::size_t i = 1; i <= spec.length; ++i) {
        const double sd = i < spec.cp ? 1.0 : spec.omega2;
        const double g = sd * rng.normal();
        const double u = rng.uniform(0.0, spec.nu);
        const double k_draw = rng.uniform();
        double k = 0.0;
        if (k_draw < spec.p) {
            k = 1.0;
        } else if (k_draw < 2.0 * spec.p) {
            k = -1.0;
        }
        out.values[i - 1] = g + u * k;
    }
    return out;
}

} // namespace robustcp
