#pragma once

// Time-series ingestion from CSV, preprocessing (log-returns, differencing,
// block aggregation) and the CSV writers for fixtures and detection traces.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "robustcp/detect.hpp"
#include "robustcp/error.hpp"
#include "robustcp/estimators.hpp"
#include "robustcp/simulate.hpp"

namespace robustcp {

struct TimeSeries {
    std::vector<double> values;
    std::string source;
    std::vector<std::string> preprocessing; // steps applied, in order
};

// 17 significant digits: enough to round-trip any double.
inline std::string format_number(double v) {
    if (std::isnan(v)) {
        return "";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// CSV reading

struct ColumnSelector {
    std::size_t index = 1; // 1-based; ignored when name is set
    std::optional<std::string> name;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && is_space(s.front())) {
        s.remove_prefix(1);
    }
    while (!s.empty() && is_space(s.back())) {
        s.remove_suffix(1);
    }
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        s = s.substr(1, s.size() - 2);
    }
    return s;
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            cells.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    return cells;
}

// Parses a finite double; NaN / inf / garbage give nullopt.
inline std::optional<double> parse_finite(std::string_view cell) {
    if (!cell.empty() && cell.front() == '+') {
        cell.remove_prefix(1);
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

} // namespace detail

/// Reads one numeric column. A first line whose selected cell is not a number
/// is taken as a header. Blank lines are skipped; any other unparseable or
/// non-finite cell is a ParseError naming the 1-based line.
inline TimeSeries ingest_csv(const std::filesystem::path& path, const ColumnSelector& column = {}) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorCode::FileNotFound, "cannot open " + path.string());
    }
    TimeSeries ts;
    ts.source = path.string();
    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    std::size_t col = column.index;
    if (col == 0 && !column.name) {
        fail(ErrorCode::InvalidParameter, "column index is 1-based");
    }
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) {
            continue;
        }
        const auto cells = detail::split_csv_line(line);
        if (first) {
            first = false;
            if (column.name) {
                std::size_t found = 0;
                for (std::size_t i = 0; i < cells.size(); ++i) {
                    if (cells[i] == *column.name) {
                        found = i + 1;
                        break;
                    }
                }
                if (found == 0) {
                    fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": no column named '" +
                                                    *column.name + "'");
                }
                col = found;
                continue;
            }
            if (col <= cells.size() && !detail::parse_finite(cells[col - 1])) {
                continue; // header
            }
        }
        if (col > cells.size()) {
            fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": missing column " + std::to_string(col));
        }
        const auto v = detail::parse_finite(cells[col - 1]);
        if (!v) {
            fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": cannot parse '" +
                                            std::string(cells[col - 1]) + "' as a finite number");
        }
        ts.values.push_back(*v);
    }
    if (ts.values.empty()) {
        fail(ErrorCode::EmptyColumn, "no values in column " + std::to_string(col) + " of " + path.string());
    }
    return ts;
}

// ---------------------------------------------------------------------------
// Preprocessing

enum class Reducer { Mean, Median };

struct PreprocessStep {
    enum class Kind { LogReturns, Difference, Aggregate };
    Kind kind = Kind::Difference;
    std::size_t order = 1; // Difference
    std::size_t block = 1; // Aggregate
    Reducer reducer = Reducer::Mean;

    static PreprocessStep log_returns() { return {Kind::LogReturns, 1, 1, Reducer::Mean}; }
    static PreprocessStep difference(std::size_t k) { return {Kind::Difference, k, 1, Reducer::Mean}; }
    static PreprocessStep aggregate(std::size_t b, Reducer r = Reducer::Mean) { return {Kind::Aggregate, 1, b, r}; }

    std::string describe() const {
        switch (kind) {
        case Kind::LogReturns: return "log-returns";
        case Kind::Difference: return "diff:" + std::to_string(order);
        case Kind::Aggregate: return "agg:" + std::to_string(block) + (reducer == Reducer::Mean ? ":mean" : ":median");
        }
        return "";
    }
};

struct PreprocessSpec {
    std::vector<PreprocessStep> steps;
};

/// Parses "log-returns,diff:1,agg:10:median" (agg reducer defaults to mean).
inline PreprocessSpec parse_preprocess(std::string_view text) {
    PreprocessSpec spec;
    const auto parse_count = [](std::string_view s, const char* what) {
        std::size_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size() || v < 1) {
            fail(ErrorCode::ConfigError, std::string(what) + " must be a positive integer, got '" + std::string(s) + "'");
        }
        return v;
    };
    for (std::string_view token : detail::split_csv_line(text)) {
        if (token.empty()) {
            continue;
        }
        if (token == "log-returns" || token == "logret") {
            spec.steps.push_back(PreprocessStep::log_returns());
        } else if (token.starts_with("diff")) {
            std::size_t k = 1;
            if (token.size() > 4) {
                if (token[4] != ':') {
                    fail(ErrorCode::ConfigError, "bad preprocessing step '" + std::string(token) + "'");
                }
                k = parse_count(token.substr(5), "difference order");
            }
            spec.steps.push_back(PreprocessStep::difference(k));
        } else if (token.starts_with("agg:")) {
            std::string_view rest = token.substr(4);
            Reducer reducer = Reducer::Mean;
            if (const auto colon = rest.find(':'); colon != std::string_view::npos) {
                const std::string_view r = rest.substr(colon + 1);
                if (r == "median") {
                    reducer = Reducer::Median;
                } else if (r != "mean") {
                    fail(ErrorCode::ConfigError, "aggregation reducer must be mean or median");
                }
                rest = rest.substr(0, colon);
            }
            spec.steps.push_back(PreprocessStep::aggregate(parse_count(rest, "aggregation block"), reducer));
        } else {
            fail(ErrorCode::ConfigError, "unknown preprocessing step '" + std::string(token) + "'");
        }
    }
    return spec;
}

namespace detail {

inline std::vector<double> apply_step(const std::vector<double>& x, const PreprocessStep& step) {
    std::vector<double> y;
    switch (step.kind) {
    case PreprocessStep::Kind::LogReturns:
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!(x[i] > 0.0)) {
                fail(ErrorCode::NonPositiveForLog, "log-returns need positive values (position " +
                                                       std::to_string(i + 1) + ")");
            }
        }
        for (std::size_t i = 0; i + 1 < x.size(); ++i) {
            y.push_back(std::log(x[i + 1] / x[i]));
        }
        break;
    case PreprocessStep::Kind::Difference:
        y = x;
        for (std::size_t k = 0; k < step.order; ++k) {
            if (y.size() < 2) {
                y.clear();
                break;
            }
            for (std::size_t i = 0; i + 1 < y.size(); ++i) {
                y[i] = y[i + 1] - y[i];
            }
            y.pop_back();
        }
        break;
    case PreprocessStep::Kind::Aggregate:
        for (std::size_t start = 0; start + step.block <= x.size(); start += step.block) {
            const std::span<const double> block(x.data() + start, step.block);
            y.push_back(step.reducer == Reducer::Mean ? mean(block) : median(block));
        }
        break;
    }
    return y;
}

} // namespace detail

/// Applies the steps in order. Aggregation drops a trailing partial block.
inline TimeSeries preprocess(const TimeSeries& ts, const PreprocessSpec& spec, std::size_t min_length = 8) {
    TimeSeries out = ts;
    for (const auto& step : spec.steps) {
        out.values = detail::apply_step(out.values, step);
        out.preprocessing.push_back(step.describe());
    }
    if (out.values.size() < min_length) {
        fail(ErrorCode::TooShortAfterPreprocess, std::to_string(out.values.size()) +
                                                     " values left after preprocessing, need at least " +
                                                     std::to_string(min_length));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Writers

// index,value,regime
inline void write_fixture_csv(std::ostream& os, const SimulatedSeries& series) {
    os << "index,value,regime\n";
    for (std::size_t i = 1; i <= series.values.size(); ++i) {
        os << i << ',' << format_number(series.values[i - 1]) << ',' << series.regime(i) << '\n';
    }
}

// n,C_n,S_n for the trace the detector ran on; S_n is empty where undefined.
inline void write_trace_csv(std::ostream& os, const DetectionResult& result) {
    os << "n,C_n,S_n\n";
    const auto& c = result.css.values;
    for (std::size_t n = 1; n <= c.size(); ++n) {
        os << n << ',' << format_number(c[n - 1]) << ',';
        if (n <= result.statistic_trace.size()) {
            os << format_number(result.statistic_trace[n - 1]);
        }
        os << '\n';
    }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        fail(ErrorCode::IoError, "cannot write " + path.string());
    }
    out << content;
}

} // namespace robustcp
