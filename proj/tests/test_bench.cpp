#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "robustcp/bench.hpp"
#include "robustcp/presets.hpp"

using namespace robustcp;

namespace {

BenchConfig small_stable() {
    BenchConfig cfg;
    cfg.stable.alphas = {1.5, 2.0};
    cfg.stable.gamma2s = {3.0, 0.33};
    cfg.lengths = {200};
    cfg.trials = 4;
    cfg.base_seed = 77;
    return cfg;
}

} // namespace

TEST(NormalizedError, Examples) {
    EXPECT_NEAR(normalized_error(380, 384, 760), 0.00526, 5e-6);
    EXPECT_DOUBLE_EQ(normalized_error(380, 384, 760), 4.0 / 760.0);
    EXPECT_DOUBLE_EQ(normalized_error(100, 100, 500), 0.0);
    EXPECT_DOUBLE_EQ(normalized_error(1, 500, 500), 499.0 / 500.0);
    EXPECT_THROW(normalized_error(0, 3, 10), Error);
    EXPECT_THROW(normalized_error(3, 11, 10), Error);
}

TEST(Boxplot, OneToHundred) {
    std::vector<double> v(100);
    std::iota(v.begin(), v.end(), 1.0);
    const auto b = summarize_boxplot(std::span<const double>(v));
    EXPECT_DOUBLE_EQ(b.min, 1.0);
    EXPECT_DOUBLE_EQ(b.q1, 25.75);
    EXPECT_DOUBLE_EQ(b.median, 50.5);
    EXPECT_DOUBLE_EQ(b.q3, 75.25);
    EXPECT_DOUBLE_EQ(b.max, 100.0);
    EXPECT_TRUE(b.outliers.empty());

    v.push_back(1000.0);
    const auto with_outlier = summarize_boxplot(std::span<const double>(v));
    ASSERT_EQ(with_outlier.outliers.size(), 1U);
    EXPECT_DOUBLE_EQ(with_outlier.outliers.front(), 1000.0);
    EXPECT_THROW(summarize_boxplot(std::span<const double>()), Error);
}

TEST(Boxplot, OrderedFields) {
    const std::vector<std::size_t> d{498, 12, 499, 501, 499, 500, 870, 497};
    const auto b = summarize_boxplot(std::span<const std::size_t>(d));
    EXPECT_LE(b.min, b.q1);
    EXPECT_LE(b.q1, b.median);
    EXPECT_LE(b.median, b.q3);
    EXPECT_LE(b.q3, b.max);
    EXPECT_EQ(b.outliers.size(), 2U);
}

TEST(MaeStudy, ReproducibleAcrossRunsAndThreads) {
    auto cfg = small_stable();
    const auto a = run_mae_study(cfg);
    const auto b = run_mae_study(cfg);
    cfg.threads = 3;
    const auto c = run_mae_study(cfg);
    ASSERT_EQ(a.results.size(), 4U);
    for (std::size_t g = 0; g < a.results.size(); ++g) {
        EXPECT_EQ(a.results[g].streams, b.results[g].streams);
        for (std::size_t m = 0; m < a.results[g].methods.size(); ++m) {
            EXPECT_EQ(a.results[g].methods[m].detections, b.results[g].methods[m].detections);
            EXPECT_EQ(a.results[g].methods[m].detections, c.results[g].methods[m].detections);
        }
    }
    EXPECT_EQ(a.method_labels.size(), 6U);
}

TEST(MaeStudy, TrialSeedsIndependentOfGridOrder) {
    auto cfg = small_stable();
    const auto forward = run_mae_study(cfg);
    std::reverse(cfg.stable.alphas.begin(), cfg.stable.alphas.end());
    std::reverse(cfg.stable.gamma2s.begin(), cfg.stable.gamma2s.end());
    cfg.methods = {cfg.methods[4], cfg.methods[1]};
    const auto shuffled = run_mae_study(cfg);
    for (const auto& gr : shuffled.results) {
        const auto it = std::find_if(forward.results.begin(), forward.results.end(), [&](const GridResult& f) {
            return f.point.alpha == gr.point.alpha && f.point.gamma2 == gr.point.gamma2;
        });
        ASSERT_NE(it, forward.results.end());
        EXPECT_EQ(it->streams, gr.streams);
        for (const auto& m : gr.methods) {
            EXPECT_EQ(it->method(m.label).detections, m.detections) << m.label;
        }
    }
}

TEST(MaeStudy, PerfectOracleHasZeroError) {
    BenchConfig cfg = small_stable();
    MethodSpec oracle;
    oracle.label = "oracle";
    oracle.custom = [](const SimulatedSeries& s) { return detector_truth(s.cp); };
    MethodSpec off_by_three;
    off_by_three.label = "off3";
    off_by_three.custom = [](const SimulatedSeries& s) { return detector_truth(s.cp) + 3; };
    cfg.methods = {oracle, off_by_three};
    const auto r = run_mae_study(cfg);
    for (const auto& gr : r.results) {
        EXPECT_DOUBLE_EQ(gr.method("oracle").mae, 0.0);
        EXPECT_DOUBLE_EQ(gr.method("off3").mae, 3.0);
        EXPECT_EQ(gr.method("oracle").failures, 0U);
    }
}

TEST(MaeStudy, FailedTrialsAreRecorded) {
    BenchConfig cfg = small_stable();
    MethodSpec flaky;
    flaky.label = "flaky";
    flaky.custom = [](const SimulatedSeries& s) -> std::size_t {
        if (s.values.front() > 0.0) {
            fail(ErrorCode::DegenerateScale, "synthetic failure");
        }
        return detector_truth(s.cp);
    };
    cfg.methods = {flaky};
    cfg.trials = 20;
    const auto r = run_mae_study(cfg);
    std::size_t failures = 0;
    for (const auto& gr : r.results) {
        const auto& m = gr.method("flaky");
        failures += m.failures;
        std::size_t missing = 0;
        for (std::size_t t = 0; t < m.detections.size(); ++t) {
            if (!m.detections[t]) {
                ++missing;
                EXPECT_NE(m.failure_messages[t].find("synthetic failure"), std::string::npos);
            }
        }
        EXPECT_EQ(missing, m.failures);
        if (m.failures < cfg.trials) {
            EXPECT_DOUBLE_EQ(m.mae, 0.0);
        }
    }
    EXPECT_GT(failures, 0U);
}

TEST(MaeStudy, ConfigValidation) {
    BenchConfig cfg = small_stable();
    cfg.trials = 0;
    EXPECT_THROW(run_mae_study(cfg), Error);
    cfg = small_stable();
    cfg.stable.alphas = {2.5};
    EXPECT_THROW(run_mae_study(cfg), Error);
    cfg = small_stable();
    cfg.lengths = {5};
    EXPECT_THROW(run_mae_study(cfg), Error);
}

TEST(MaeStudy, MixtureGridUsesRelativeNu) {
    BenchConfig cfg;
    cfg.generator = GeneratorKind::Mixture;
    cfg.mixture.omega2s = {2.0, 4.0};
    cfg.mixture.nus = {1.5};
    cfg.lengths = {100};
    const auto points = grid_points(cfg);
    ASSERT_EQ(points.size(), 2U);
    EXPECT_DOUBLE_EQ(points[0].nu, 3.0);
    EXPECT_DOUBLE_EQ(points[1].nu, 6.0);
    EXPECT_EQ(points[0].cp, 50U);
}

TEST(MedianCi, BinomialRanks) {
    // classical table values: n = 100 -> ranks 40 and 61 (one-based)
    const auto [lo, hi] = median_ci_ranks(100);
    EXPECT_EQ(lo, 39U);
    EXPECT_EQ(hi, 60U);
    const auto [lo10, hi10] = median_ci_ranks(10);
    EXPECT_EQ(lo10, 1U);
    EXPECT_EQ(hi10, 8U);
    const auto [lo1, hi1] = median_ci_ranks(1);
    EXPECT_EQ(lo1, 0U);
    EXPECT_EQ(hi1, 0U);
}

TEST(PowerLawFit, RecoversExponent) {
    const std::vector<std::size_t> n{100, 200, 500, 1000, 5000};
    std::vector<double> t;
    for (std::size_t v : n) {
        t.push_back(3e-7 * std::pow(static_cast<double>(v), 1.37));
    }
    const auto fit = fit_power_law("x", n, t);
    EXPECT_NEAR(fit.exponent, 1.37, 1e-12);
    EXPECT_NEAR(fit.log_coef, std::log(3e-7), 1e-9);
}

TEST(TimingStudy, RejectsDegenerateLengthLists) {
    BenchConfig cfg = presets::mixture_timing(true);
    cfg.lengths = {500, 500, 500, 500, 500};
    try {
        run_timing_study(cfg);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ConfigError);
    }
    cfg.lengths = {100, 200, 300, 400, 500};
    EXPECT_THROW(run_timing_study(cfg), Error);
}

TEST(TimingStudy, SmallRun) {
    BenchConfig cfg = presets::mixture_timing(true);
    cfg.lengths = {20, 40, 80, 120, 200};
    cfg.trials = 3;
    const auto r = run_timing_study(cfg);
    EXPECT_EQ(r.rows.size(), 5U * 4U);
    EXPECT_EQ(r.fits.size(), 4U);
    for (const auto& row : r.rows) {
        EXPECT_EQ(row.seconds.size(), 3U);
        EXPECT_LE(row.ci_low, row.median_seconds);
        EXPECT_GE(row.ci_high, row.median_seconds);
    }
    EXPECT_NO_THROW(r.fit("ICSS[BMID]"));
    EXPECT_NO_THROW(r.row(200, "OLS[QCV]"));
}

TEST(Presets, Names) {
    for (const auto& name : presets::names()) {
        EXPECT_NO_THROW(validate(presets::by_name(name))) << name;
    }
    EXPECT_EQ(presets::by_name("paper-table4").stable.gamma2s.size(), 8U);
    EXPECT_EQ(presets::by_name("paper-timing").lengths.size(), 25U);
    EXPECT_THROW(presets::by_name("nope"), Error);
}
