#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "robustcp/detect.hpp"
#include "robustcp/random.hpp"
#include "robustcp/simulate.hpp"

using namespace robustcp;

namespace {

CssTrace trace_of(std::vector<double> values) {
    CssTrace t;
    t.values = std::move(values);
    return t;
}

std::vector<double> gaussian_two_regime(std::uint64_t seed) {
    RandomStream rng(seed);
    std::vector<double> x(1000);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = (i + 1 < 500 ? 1.0 : 3.0) * rng.normal();
    }
    return x;
}

// C_j = j for j <= k, then slope 3 after the kink; the kink point lies on both lines
std::vector<double> kinked(std::size_t n, std::size_t k) {
    std::vector<double> c(n);
    for (std::size_t j = 1; j <= n; ++j) {
        c[j - 1] = j <= k ? static_cast<double>(j) : static_cast<double>(k) + 3.0 * static_cast<double>(j - k);
    }
    return c;
}

// Two separate lines: j for j <= k, 3j - 2k + 5 for j > k
std::vector<double> two_segment(std::size_t n, std::size_t k) {
    std::vector<double> c(n);
    for (std::size_t j = 1; j <= n; ++j) {
        const double dj = static_cast<double>(j);
        c[j - 1] = j <= k ? dj : 3.0 * dj - 2.0 * static_cast<double>(k) + 5.0;
    }
    return c;
}

} // namespace

TEST(IcssDetect, StepExample) {
    const auto c = classical_css(std::vector<double>{1, 1, 1, 10, 10, 10});
    const auto r = icss_detect(c);
    const std::vector<double> expected{-0.1634, -0.3267, -0.4901, -0.3267, -0.1634, 0.0};
    ASSERT_EQ(r.statistic_trace.size(), 6U);
    for (std::size_t i = 0; i < 6; ++i) {
        EXPECT_NEAR(r.statistic_trace[i], expected[i], 5e-5);
    }
    EXPECT_EQ(r.change_point, 3U);
    EXPECT_NEAR(r.statistic_at_cp, -0.4901, 5e-5);

    const auto oracle = oracle::icss_statistic(c.values);
    for (std::size_t i = 0; i < 6; ++i) {
        EXPECT_DOUBLE_EQ(r.statistic_trace[i], oracle[i]);
    }
}

TEST(IcssDetect, GaussianTwoRegime) {
    const auto r = icss_detect(classical_css(gaussian_two_regime(31)));
    EXPECT_NEAR(static_cast<double>(r.change_point), 500.0, 30.0);
    EXPECT_NEAR(r.statistic_trace.back(), 0.0, 1e-12);
}

TEST(IcssDetect, ConstantNonzeroSeriesSignalsNoChange) {
    const auto r = icss_detect(classical_css(std::vector<double>(50, 2.0)));
    EXPECT_EQ(r.change_point, 2U);
    EXPECT_NEAR(r.statistic_at_cp, 0.0, 1e-12);
}

TEST(IcssDetect, Errors) {
    try {
        icss_detect(classical_css(std::vector<double>(10, 0.0)));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ZeroTotalSumOfSquares);
    }
    EXPECT_THROW(icss_detect(trace_of({1, 2, 3})), Error);
}

TEST(IcssDetect, ScaleInvariance) {
    const auto x = gaussian_two_regime(32);
    const auto base = icss_detect(classical_css(x));
    for (double k : {1e-3, 0.7, 2.0, 1e4}) {
        std::vector<double> y = x;
        for (auto& v : y) {
            v *= k;
        }
        EXPECT_EQ(icss_detect(classical_css(y)).change_point, base.change_point) << k;
    }
}

TEST(OlsDetect, GaussianTwoRegime) {
    const auto r = ols_detect(classical_css(gaussian_two_regime(31)));
    EXPECT_NEAR(static_cast<double>(r.change_point), 500.0, 40.0);
    EXPECT_EQ(r.statistic_trace.size(), 999U);
}

TEST(OlsDetect, PiecewiseLinearBreakpoint) {
    for (std::size_t k : {2U, 3U, 17U, 60U, 97U, 98U}) {
        const auto r = ols_detect(trace_of(two_segment(100, k)));
        EXPECT_EQ(r.change_point, k);
        EXPECT_NEAR(r.statistic_at_cp, 0.0, 1e-9);
        for (std::size_t n = 2; n <= 98; ++n) {
            if (n != k) {
                EXPECT_GT(r.statistic_trace[n - 1], 1e-6);
            }
        }
    }
}

TEST(OlsDetect, ContinuousKinkTiesResolveToSmallerIndex) {
    // splitting at k - 1 or at k both leave two exactly collinear segments
    for (std::size_t k : {3U, 17U, 60U, 98U}) {
        const auto r = ols_detect(trace_of(kinked(100, k)));
        EXPECT_NEAR(r.statistic_trace[k - 1], 0.0, 1e-9);
        EXPECT_EQ(r.change_point, k - 1);
    }
}

TEST(IcssDetect, PiecewiseLinearBreakpoint) {
    for (std::size_t k : {10U, 50U, 90U}) {
        EXPECT_EQ(icss_detect(trace_of(kinked(100, k))).change_point, k);
        EXPECT_EQ(icss_detect(trace_of(two_segment(100, k))).change_point, k);
    }
}

TEST(OlsDetect, MatchesRefitOracleAndIsNonnegative) {
    RandomStream rng(33);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 6 + rng.next_bits() % 300;
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = (i < n / 3 ? 1.0 : 4.0) * rng.normal() + rng.uniform(-1.0, 1.0);
        }
        const auto c = classical_css(x);
        const auto r = ols_detect(c);
        const auto refit = oracle::ols_statistic_refit(c.values);
        ASSERT_EQ(r.statistic_trace.size(), refit.size());
        const double scale = c.values.back() * c.values.back();
        std::size_t best = 2;
        for (std::size_t j = 0; j < refit.size(); ++j) {
            EXPECT_GE(r.statistic_trace[j], 0.0);
            EXPECT_NEAR(r.statistic_trace[j], refit[j], 1e-9 * scale + 1e-9);
            if (j + 1 >= 2 && j + 1 <= n - 2 && refit[j] < refit[best - 1]) {
                best = j + 1;
            }
        }
        EXPECT_NEAR(r.statistic_trace[r.change_point - 1], refit[best - 1], 1e-9 * scale + 1e-9);
        EXPECT_GE(r.change_point, 2U);
        EXPECT_LE(r.change_point, n - 2);
    }
}

TEST(OlsDetect, Errors) { EXPECT_THROW(ols_detect(trace_of({1, 2, 3, 4, 5})), Error); }

TEST(ReversalMapping, RoundTrip) {
    const std::size_t n = 200;
    for (std::size_t k = 1; k <= n; ++k) {
        EXPECT_EQ(map_reversed_index(map_reversed_index(k, n), n), k);
    }
    EXPECT_EQ(map_reversed_index(1, n), n);
    EXPECT_EQ(map_reversed_index(n, n), 1U);

    // kink at 40 in reversed order reads as index 161 in original order
    const auto rev = ols_detect(trace_of(two_segment(n, 40)));
    EXPECT_EQ(map_reversed_index(rev.change_point, n), 161U);
}

TEST(DetectWithOrientation, ContractOnUnchangedSeries) {
    RandomStream rng(34);
    std::vector<double> x(400);
    for (auto& v : x) {
        v = rng.normal();
    }
    for (Method m : {Method::Icss, Method::Ols}) {
        for (const auto& spec : {ScaleEstimatorSpec::biweight(), ScaleEstimatorSpec::quantile()}) {
            const auto r = detect_with_orientation(x, m, spec);
            EXPECT_GE(r.change_point, 2U);
            EXPECT_LE(r.change_point, x.size() - 1);
            ASSERT_TRUE(r.orientation.has_value());
            if (*r.orientation == Orientation::Concave) {
                EXPECT_FALSE(r.reversed_applied);
                EXPECT_FALSE(r.constant_prefix_fallback);
            } else {
                EXPECT_NE(r.reversed_applied, r.constant_prefix_fallback);
            }
        }
    }
    EXPECT_THROW(detect_with_orientation(std::vector<double>{1, 2, 3, 4, 5, 6, 7}, Method::Icss,
                                         ScaleEstimatorSpec::biweight()),
                 Error);
}

TEST(DetectWithOrientation, ReversedDetectionMapsBack) {
    double abs_error = 0.0;
    for (std::uint64_t seed = 30; seed < 50; ++seed) {
        StableSpec spec;
        spec.alpha = 1.5;
        spec.gamma2 = 3.0;
        spec.seed = seed;
        const auto s = gen_stable_series(spec);
        const auto r = detect_with_orientation(s.values, Method::Icss, ScaleEstimatorSpec::biweight());
        ASSERT_TRUE(r.reversed_applied);
        EXPECT_TRUE(r.css.reversed);
        const auto direct = icss_detect(robust_css(reverse_sample(s.values), ScaleEstimatorSpec::biweight()));
        EXPECT_EQ(r.change_point, map_reversed_index(direct.change_point, s.values.size()));
        abs_error += std::abs(static_cast<double>(r.change_point) - 499.0);
    }
    EXPECT_LT(abs_error / 20.0, 20.0);
}

// Observed orientation of robust traces for the two scale directions.
TEST(DetectWithOrientation, ObservedOrientationByScaleDirection) {
    int increase_convex = 0;
    int decrease_concave = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        StableSpec spec;
        spec.alpha = 1.5;
        spec.seed = 900 + seed;
        spec.gamma2 = 2.0;
        const auto up = detect_with_orientation(gen_stable_series(spec).values, Method::Icss,
                                                ScaleEstimatorSpec::biweight());
        spec.gamma2 = 0.25;
        const auto down = detect_with_orientation(gen_stable_series(spec).values, Method::Icss,
                                                  ScaleEstimatorSpec::biweight());
        increase_convex += up.orientation == Orientation::Convex ? 1 : 0;
        decrease_concave += down.orientation == Orientation::Concave ? 1 : 0;
    }
    EXPECT_GE(increase_convex, 47);
    EXPECT_GE(decrease_concave, 47);
}

TEST(MethodLabel, Names) {
    EXPECT_EQ(method_label(Method::Icss, ScaleEstimatorSpec::classical()), "ICSS");
    EXPECT_EQ(method_label(Method::Icss, ScaleEstimatorSpec::biweight()), "ICSS[BMID]");
    EXPECT_EQ(method_label(Method::Ols, ScaleEstimatorSpec::quantile()), "OLS[QCV]");
}
