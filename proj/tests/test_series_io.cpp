#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "robustcp/detect.hpp"
#include "robustcp/random.hpp"
#include "robustcp/series_io.hpp"
#include "robustcp/simulate.hpp"

using namespace robustcp;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    TempDir()
        : path_(fs::temp_directory_path() /
                ("robustcp_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()))) {
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }

    fs::path write(const std::string& name, const std::string& content) const {
        const fs::path p = path_ / name;
        std::ofstream(p) << content;
        return p;
    }

private:
    fs::path path_;
};

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::IoError;
}

} // namespace

TEST(IngestCsv, HeaderAndColumnSelection) {
    TempDir dir;
    const auto p = dir.write("two.csv", "time,price\n1,10.5\n2,11\n\n3,12.25\n");
    const auto ts = ingest_csv(p, {2, std::nullopt});
    EXPECT_EQ(ts.values, (std::vector<double>{10.5, 11.0, 12.25}));
    EXPECT_EQ(ts.source, p.string());

    const auto by_name = ingest_csv(p, {1, std::string("price")});
    EXPECT_EQ(by_name.values, ts.values);
    EXPECT_EQ(ingest_csv(p).values, (std::vector<double>{1, 2, 3}));
}

TEST(IngestCsv, HeaderlessSingleColumn) {
    TempDir dir;
    const auto p = dir.write("one.csv", "0.5\n-1e-3\n2E2\n");
    EXPECT_EQ(ingest_csv(p).values, (std::vector<double>{0.5, -1e-3, 200.0}));
}

TEST(IngestCsv, NanCellNamesLine) {
    TempDir dir;
    const auto p = dir.write("nan.csv", "v\n1\n2\nNaN\n4\n");
    try {
        ingest_csv(p);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ParseError);
        EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
    }
    const auto inf = dir.write("inf.csv", "1\ninf\n");
    EXPECT_EQ(code_of([&] { ingest_csv(inf); }), ErrorCode::ParseError);
}

TEST(IngestCsv, Errors) {
    TempDir dir;
    EXPECT_EQ(code_of([&] { ingest_csv("/nonexistent/robustcp.csv"); }), ErrorCode::FileNotFound);
    const auto header_only = dir.write("h.csv", "value\n\n");
    EXPECT_EQ(code_of([&] { ingest_csv(header_only); }), ErrorCode::EmptyColumn);
    const auto short_row = dir.write("s.csv", "a,b\n1,2\n3\n");
    EXPECT_EQ(code_of([&] { ingest_csv(short_row, {2, std::nullopt}); }), ErrorCode::ParseError);
    const auto named = dir.write("n.csv", "a,b\n1,2\n");
    EXPECT_EQ(code_of([&] { ingest_csv(named, {1, std::string("c")}); }), ErrorCode::ParseError);
}

TEST(Preprocess, Examples) {
    TimeSeries ts;
    ts.values = {1, 4, 9, 16};
    EXPECT_EQ(preprocess(ts, {{PreprocessStep::difference(1)}}, 1).values, (std::vector<double>{3, 5, 7}));

    ts.values = {1, 3, 5, 7};
    EXPECT_EQ(preprocess(ts, {{PreprocessStep::aggregate(2)}}, 1).values, (std::vector<double>{2, 6}));

    ts.values = {1.0, std::numbers::e, std::numbers::e * std::numbers::e};
    const auto lr = preprocess(ts, {{PreprocessStep::log_returns()}}, 1).values;
    ASSERT_EQ(lr.size(), 2U);
    EXPECT_NEAR(lr[0], 1.0, 1e-15);
    EXPECT_NEAR(lr[1], 1.0, 1e-15);

    ts.values = {1, 2, 100, 4, 5, 6};
    const auto med = preprocess(ts, {{PreprocessStep::aggregate(3, Reducer::Median)}}, 1);
    EXPECT_EQ(med.values, (std::vector<double>{2, 5}));
    EXPECT_EQ(med.preprocessing, (std::vector<std::string>{"agg:3:median"}));
}

TEST(Preprocess, Errors) {
    TimeSeries ts;
    ts.values = {1, 2, 0, 4, 5, 6, 7, 8, 9, 10};
    EXPECT_EQ(code_of([&] { preprocess(ts, {{PreprocessStep::log_returns()}}); }), ErrorCode::NonPositiveForLog);
    ts.values = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    EXPECT_EQ(code_of([&] { preprocess(ts, {{PreprocessStep::aggregate(2)}}); }),
              ErrorCode::TooShortAfterPreprocess);
    EXPECT_NO_THROW(preprocess(ts, {{PreprocessStep::difference(2)}}));
}

TEST(Preprocess, LengthAlgebra) {
    RandomStream rng(61);
    for (std::size_t n = 1; n <= 120; ++n) {
        TimeSeries ts;
        ts.values.resize(n);
        for (auto& v : ts.values) {
            v = rng.normal();
        }
        for (std::size_t k = 1; k <= 4; ++k) {
            for (std::size_t b = 1; b <= 7; ++b) {
                const std::size_t expected = n > k ? (n - k) / b : 0;
                const auto out = preprocess(ts, {{PreprocessStep::difference(k), PreprocessStep::aggregate(b)}}, 0);
                ASSERT_EQ(out.values.size(), expected) << n << ' ' << k << ' ' << b;
            }
        }
    }
}

TEST(ParsePreprocess, Recipes) {
    const auto spec = parse_preprocess("log-returns, diff:2 ,agg:10:median,diff");
    ASSERT_EQ(spec.steps.size(), 4U);
    EXPECT_EQ(spec.steps[0].kind, PreprocessStep::Kind::LogReturns);
    EXPECT_EQ(spec.steps[1].order, 2U);
    EXPECT_EQ(spec.steps[2].block, 10U);
    EXPECT_EQ(spec.steps[2].reducer, Reducer::Median);
    EXPECT_EQ(spec.steps[3].order, 1U);
    EXPECT_TRUE(parse_preprocess("").steps.empty());
    EXPECT_EQ(code_of([] { parse_preprocess("agg:0"); }), ErrorCode::ConfigError);
    EXPECT_EQ(code_of([] { parse_preprocess("smooth"); }), ErrorCode::ConfigError);
    EXPECT_EQ(code_of([] { parse_preprocess("agg:4:max"); }), ErrorCode::ConfigError);
}

TEST(FormatNumber, RoundTripsDoubles) {
    RandomStream rng(62);
    for (int i = 0; i < 1000; ++i) {
        const double v = rng.normal() * std::pow(10.0, rng.uniform(-290.0, 290.0));
        EXPECT_EQ(std::stod(format_number(v)), v);
    }
    EXPECT_EQ(format_number(std::nan("")), "");
}

TEST(Writers, FixtureRoundTrip) {
    TempDir dir;
    StableSpec spec;
    spec.length = 50;
    spec.cp = 20;
    spec.seed = 63;
    const auto s = gen_stable_series(spec);
    std::ostringstream os;
    write_fixture_csv(os, s);
    const auto p = dir.write("fixture.csv", os.str());
    EXPECT_EQ(ingest_csv(p, {2, std::nullopt}).values, s.values);
    const auto regime = ingest_csv(p, {3, std::nullopt}).values;
    EXPECT_EQ(regime[18], 1.0);
    EXPECT_EQ(regime[19], 2.0);
}

TEST(Writers, TraceCsvLeavesUndefinedStatisticBlank) {
    const std::vector<double> x{1, 2, 1, 3, 5, 4, 6, 5};
    const auto r = ols_detect(classical_css(x));
    std::ostringstream os;
    write_trace_csv(os, r);
    std::istringstream in(os.str());
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) {
        lines.push_back(line);
    }
    ASSERT_EQ(lines.size(), 9U);
    EXPECT_EQ(lines[0], "n,C_n,S_n");
    EXPECT_EQ(lines[8], "8,117,");
    EXPECT_EQ(lines[1].substr(0, 4), "1,1,");
}
