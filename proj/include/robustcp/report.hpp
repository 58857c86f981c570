#pragma once

// JSON and CSV renderings of detection results and bench reports.
//
// CSV layouts:
//   mae wide : generator fields, N, cp, then one MAE column per method
//   mae tidy : generator fields, N, cp, method, mae, min, q1, median, q3, max, failures
//   boxplot  : grid, method, trial, detection
//   timing   : N, method, trials, median_s, ci_low_s, ci_high_s

#include <cmath>
#include <sstream>
#include <string>

#include "json.hpp"

#include "robustcp/bench.hpp"
#include "robustcp/detect.hpp"
#include "robustcp/series_io.hpp"

namespace robustcp {

using json = nlohmann::json;

inline json estimator_json(const ScaleEstimatorSpec& spec) {
    json j{{"kind", to_string(spec.kind)}, {"location", to_string(spec.location())}};
    if (spec.kind == EstimatorKind::Bmid) {
        j["c"] = spec.bmid.c;
    } else if (spec.kind == EstimatorKind::Qcv) {
        j["a"] = spec.qcv.a;
        j["b"] = spec.qcv.b;
    }
    return j;
}

inline json to_json(const DetectionResult& r) {
    json j{
        {"change_point", r.change_point},
        {"method", to_string(r.method)},
        {"label", method_label(r.method, r.estimator)},
        {"estimator", estimator_json(r.estimator)},
        {"statistic_at_cp", r.statistic_at_cp},
        {"reversed_applied", r.reversed_applied},
        {"constant_prefix_fallback", r.constant_prefix_fallback},
        {"length", r.css.source_length()},
        {"degenerate_scale_prefixes", r.css.degenerate_prefixes},
    };
    j["orientation"] = r.orientation ? json(to_string(*r.orientation)) : json(nullptr);
    return j;
}

namespace detail {

inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline void grid_header(std::ostream& os, GeneratorKind g) {
    if (g == GeneratorKind::Stable) {
        os << "alpha,gamma1,gamma2,N,cp";
    } else {
        os << "omega2,nu,nu_ratio,p,N,cp";
    }
}

inline void grid_fields(std::ostream& os, const GridPoint& gp) {
    if (gp.generator == GeneratorKind::Stable) {
        os << format_number(gp.alpha) << ',' << format_number(gp.gamma1) << ',' << format_number(gp.gamma2);
    } else {
        os << format_number(gp.omega2) << ',' << format_number(gp.nu) << ',' << format_number(gp.nu / gp.omega2)
           << ',' << format_number(gp.p);
    }
    os << ',' << gp.length << ',' << gp.cp;
}

inline json grid_json(const GridPoint& gp) {
    json j{{"generator", to_string(gp.generator)}, {"N", gp.length}, {"cp", gp.cp}, {"id", gp.id()}};
    if (gp.generator == GeneratorKind::Stable) {
        j["alpha"] = gp.alpha;
        j["gamma1"] = gp.gamma1;
        j["gamma2"] = gp.gamma2;
    } else {
        j["omega2"] = gp.omega2;
        j["nu"] = gp.nu;
        j["p"] = gp.p;
    }
    return j;
}

} // namespace detail

inline json to_json(const BenchReport& report) {
    json results = json::array();
    for (const auto& gr : report.results) {
        json methods = json::array();
        for (const auto& m : gr.methods) {
            json detections = json::array();
            for (const auto& d : m.detections) {
                detections.push_back(d ? json(*d) : json(nullptr));
            }
            json jm{{"method", m.label},
                    {"mae", detail::number_or_null(m.mae)},
                    {"failures", m.failures},
                    {"detections", detections}};
            if (m.boxplot) {
                jm["boxplot"] = {{"min", m.boxplot->min},       {"q1", m.boxplot->q1},
                                 {"median", m.boxplot->median}, {"q3", m.boxplot->q3},
                                 {"max", m.boxplot->max},       {"outliers", m.boxplot->outliers}};
            }
            json errors = json::array();
            for (std::size_t t = 0; t < m.failure_messages.size(); ++t) {
                if (!m.failure_messages[t].empty()) {
                    errors.push_back({{"trial", t}, {"error", m.failure_messages[t]}});
                }
            }
            jm["errors"] = errors;
            methods.push_back(jm);
        }
        results.push_back({{"grid", detail::grid_json(gr.point)}, {"streams", gr.streams}, {"methods", methods}});
    }
    return {{"base_seed", report.base_seed},
            {"trials", report.trials},
            {"methods", report.method_labels},
            {"results", results}};
}

inline std::string mae_wide_csv(const BenchReport& report) {
    std::ostringstream os;
    if (report.results.empty()) {
        return "";
    }
    detail::grid_header(os, report.results.front().point.generator);
    for (const auto& label : report.method_labels) {
        os << ',' << label;
    }
    os << '\n';
    for (const auto& gr : report.results) {
        detail::grid_fields(os, gr.point);
        for (const auto& m : gr.methods) {
            os << ',' << format_number(m.mae);
        }
        os << '\n';
    }
    return os.str();
}

inline std::string mae_tidy_csv(const BenchReport& report) {
    std::ostringstream os;
    if (report.results.empty()) {
        return "";
    }
    detail::grid_header(os, report.results.front().point.generator);
    os << ",method,mae,min,q1,median,q3,max,failures\n";
    for (const auto& gr : report.results) {
        for (const auto& m : gr.methods) {
            detail::grid_fields(os, gr.point);
            os << ',' << m.label << ',' << format_number(m.mae);
            if (m.boxplot) {
                os << ',' << format_number(m.boxplot->min) << ',' << format_number(m.boxplot->q1) << ','
                   << format_number(m.boxplot->median) << ',' << format_number(m.boxplot->q3) << ','
                   << format_number(m.boxplot->max);
            } else {
                os << ",,,,,";
            }
            os << ',' << m.failures << '\n';
        }
    }
    return os.str();
}

inline std::string boxplot_csv(const BenchReport& report) {
    std::ostringstream os;
    os << "grid,method,trial,detection\n";
    for (const auto& gr : report.results) {
        const std::string grid = "\"" + gr.point.label() + "\"";
        for (const auto& m : gr.methods) {
            for (std::size_t t = 0; t < m.detections.size(); ++t) {
                os << grid << ',' << m.label << ',' << t << ',';
                if (m.detections[t]) {
                    os << *m.detections[t];
                }
                os << '\n';
            }
        }
    }
    return os.str();
}

inline json to_json(const TimingReport& report) {
    json rows = json::array();
    for (const auto& r : report.rows) {
        rows.push_back({{"N", r.length},
                        {"method", r.label},
                        {"trials", r.trials},
                        {"median_s", r.median_seconds},
                        {"ci_low_s", r.ci_low},
                        {"ci_high_s", r.ci_high}});
    }
    json fits = json::array();
    for (const auto& f : report.fits) {
        fits.push_back({{"method", f.label}, {"exponent", f.exponent}, {"log_coef", f.log_coef}});
    }
    return {{"base_seed", report.base_seed}, {"rows", rows}, {"fits", fits}};
}

inline std::string timing_csv(const TimingReport& report) {
    std::ostringstream os;
    os << "N,method,trials,median_s,ci_low_s,ci_high_s\n";
    for (const auto& r : report.rows) {
        os << r.length << ',' << r.label << ',' << r.trials << ',' << format_number(r.median_seconds) << ','
           << format_number(r.ci_low) << ',' << format_number(r.ci_high) << '\n';
    }
    return os.str();
}

} // namespace robustcp
