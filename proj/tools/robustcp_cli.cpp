// robustcp: command-line front-end.
//
//   robustcp detect   --input series.csv --method ols --estimator qcv
//   robustcp simulate stable --alpha 1.9 --gamma2 3 --n 1000 --cp 500 --seed 7
//   robustcp bench mae --preset paper-table4-desk --out-dir out/
//   robustcp bench timing --preset paper-timing-desk
//
// Every subcommand accepts --config FILE with flat `key = value` lines named
// after the long options (e.g. `method = ols`). Command-line flags override
// the file; the file overrides ROBUSTCP_SEED; that overrides built-in
// defaults. Errors go to stderr as one JSON object and the exit code is
// nonzero: 2 for library errors, 64 for usage errors.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "robustcp/robustcp.hpp"

namespace fs = std::filesystem;
using namespace robustcp;

namespace {

constexpr int kLibraryError = 2;
constexpr int kUsageError = 64;

struct EstimatorOptions {
    std::string estimator = "bmid";
    double bmid_c = 9.0;
    double qcv_a = 0.1;
    double qcv_b = 0.9;

    ScaleEstimatorSpec spec() const {
        if (estimator == "classical") return ScaleEstimatorSpec::classical();
        if (estimator == "qcv") return ScaleEstimatorSpec::quantile({qcv_a, qcv_b});
        return ScaleEstimatorSpec::biweight({bmid_c});
    }
};

struct StableOptions {
    double alpha = 1.5;
    double gamma1 = 1.0;
    double gamma2 = 2.0;
};

struct MixtureOptions {
    double omega2 = 2.0;
    double nu = 10.0;
    double p = 0.05;
};

struct SeriesOptions {
    std::size_t n = 1000;
    std::optional<std::size_t> cp;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

void add_estimator_options(CLI::App* app, EstimatorOptions& o, bool with_kind) {
    if (with_kind) {
        app->add_option("--estimator", o.estimator, "Scale estimator")
            ->check(CLI::IsMember({"classical", "bmid", "qcv"}))
            ->capture_default_str();
    }
    app->add_option("--bmid-c", o.bmid_c, "Biweight tuning constant c")->capture_default_str();
    app->add_option("--qcv-a", o.qcv_a, "QCV lower quantile")->capture_default_str();
    app->add_option("--qcv-b", o.qcv_b, "QCV upper quantile")->capture_default_str();
}

void add_stable_options(CLI::App* app, StableOptions& o) {
    app->add_option("--alpha", o.alpha, "Stability index in (0, 2]")->capture_default_str();
    app->add_option("--gamma1", o.gamma1, "Scale before the change")->capture_default_str();
    app->add_option("--gamma2", o.gamma2, "Scale from the change on")->capture_default_str();
}

void add_mixture_options(CLI::App* app, MixtureOptions& o) {
    app->add_option("--omega2", o.omega2, "Gaussian std from the change on")->capture_default_str();
    app->add_option("--nu", o.nu, "Spike amplitude bound")->capture_default_str();
    app->add_option("--p", o.p, "Probability of each spike sign")->capture_default_str();
}

void add_series_options(CLI::App* app, SeriesOptions& o) {
    app->add_option("--n", o.n, "Series length")->capture_default_str();
    app->add_option("--cp", o.cp, "Change point (1-based first index of regime 2); default N/2");
    app->add_option("--seed", o.seed, "Random seed")->envname("ROBUSTCP_SEED")->capture_default_str();
    app->add_option("--stream", o.stream, "Random stream id")->capture_default_str();
}

SimulatedSeries simulate_stable(const StableOptions& s, const SeriesOptions& o) {
    return gen_stable_series({s.alpha, s.gamma1, s.gamma2, o.n, o.cp.value_or(o.n / 2), o.seed, o.stream});
}

SimulatedSeries simulate_mixture(const MixtureOptions& m, const SeriesOptions& o) {
    MixtureSpec spec;
    spec.omega2 = m.omega2;
    spec.nu = m.nu;
    spec.p = m.p;
    spec.length = o.n;
    spec.cp = o.cp.value_or(o.n / 2);
    spec.seed = o.seed;
    spec.stream = o.stream;
    return gen_mixture_series(spec);
}

void emit(const fs::path& out_dir, const std::string& name, const std::string& content) {
    write_text_file(out_dir / name, content);
}

// ---------------------------------------------------------------------------

struct DetectOptions {
    std::string input;
    std::size_t column = 1;
    std::string column_name;
    std::string generate;
    StableOptions stable;
    MixtureOptions mixture;
    SeriesOptions series;
    std::string method = "icss";
    EstimatorOptions est;
    std::string orientation = "auto";
    std::size_t head_len = 6;
    double threshold = 0.05;
    bool exact_naive = false;
    std::string preprocess;
    std::string out_dir;
};

int run_detect(const DetectOptions& o) {
    TimeSeries ts;
    std::optional<std::size_t> truth;
    if (!o.input.empty()) {
        ColumnSelector col{o.column, std::nullopt};
        if (!o.column_name.empty()) {
            col.name = o.column_name;
        }
        ts = ingest_csv(o.input, col);
    } else {
        const SimulatedSeries s =
            o.generate == "stable" ? simulate_stable(o.stable, o.series) : simulate_mixture(o.mixture, o.series);
        ts.values = s.values;
        ts.source = "simulate:" + o.generate;
        truth = s.cp;
    }
    if (!o.preprocess.empty()) {
        ts = preprocess(ts, parse_preprocess(o.preprocess));
    }

    const Method method = o.method == "ols" ? Method::Ols : Method::Icss;
    const ScaleEstimatorSpec spec = o.est.spec();
    const bool use_orientation = o.orientation == "on" || (o.orientation == "auto" && spec.robust());
    const CssMode mode = o.exact_naive ? CssMode::ExactNaive : CssMode::Incremental;

    DetectionResult r;
    if (use_orientation) {
        r = detect_with_orientation(ts.values, method, spec, {o.head_len, o.threshold, mode});
    } else {
        const CssTrace trace = spec.robust() || mode == CssMode::ExactNaive ? robust_css(ts.values, spec, mode)
                                                                           : classical_css(ts.values);
        r = detect(trace, method);
    }

    json j = to_json(r);
    j["source"] = ts.source;
    j["preprocessing"] = ts.preprocessing;
    j["length"] = ts.values.size();
    if (truth) {
        j["true_change_point"] = *truth;
    }
    const std::string text = j.dump(2);
    std::cout << text << '\n';
    if (!o.out_dir.empty()) {
        emit(o.out_dir, "detection.json", text + "\n");
        std::ostringstream trace;
        write_trace_csv(trace, r);
        emit(o.out_dir, "trace.csv", trace.str());
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct SimulateOptions {
    StableOptions stable;
    MixtureOptions mixture;
    SeriesOptions series;
    std::string out;
};

int write_series(const SimulatedSeries& s, const std::string& out) {
    std::ostringstream os;
    write_fixture_csv(os, s);
    if (out.empty()) {
        std::cout << os.str();
    } else {
        write_text_file(out, os.str());
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct BenchOptions {
    std::string preset;
    bool full = false;
    std::optional<std::size_t> trials;
    std::uint64_t seed = 20240101;
    std::size_t threads = 1;
    EstimatorOptions est;
    bool exact_naive = false;
    std::string out_dir;
};

BenchConfig bench_config(const BenchOptions& o) {
    std::string name = o.preset;
    if (o.full && name.ends_with("-desk")) {
        name.erase(name.size() - 5);
    }
    BenchConfig cfg = presets::by_name(name);
    if (o.trials) {
        cfg.trials = *o.trials;
    }
    cfg.base_seed = o.seed;
    cfg.threads = o.threads;
    cfg.mode = o.exact_naive ? CssMode::ExactNaive : CssMode::Incremental;
    // re-tune the estimators in place, keeping the preset's method list
    for (auto& m : cfg.methods) {
        if (m.estimator.kind == EstimatorKind::Bmid) {
            m.estimator.bmid.c = o.est.bmid_c;
        } else if (m.estimator.kind == EstimatorKind::Qcv) {
            m.estimator.qcv = {o.est.qcv_a, o.est.qcv_b};
        }
        validate(m.estimator);
    }
    return cfg;
}

int run_bench_mae(const BenchOptions& o) {
    const BenchReport report = run_mae_study(bench_config(o));
    const std::string wide = mae_wide_csv(report);
    std::cout << wide;
    if (!o.out_dir.empty()) {
        emit(o.out_dir, "mae.csv", wide);
        emit(o.out_dir, "mae_tidy.csv", mae_tidy_csv(report));
        emit(o.out_dir, "boxplot.csv", boxplot_csv(report));
        emit(o.out_dir, "report.json", to_json(report).dump(2) + "\n");
    }
    return 0;
}

int run_bench_timing(const BenchOptions& o) {
    const TimingReport report = run_timing_study(bench_config(o));
    for (const auto& f : report.fits) {
        std::cout << f.label << " exponent=" << format_number(f.exponent) << '\n';
    }
    if (!o.out_dir.empty()) {
        emit(o.out_dir, "timing.csv", timing_csv(report));
        emit(o.out_dir, "timing.json", to_json(report).dump(2) + "\n");
    } else {
        std::cout << timing_csv(report);
    }
    return 0;
}

void add_bench_options(CLI::App* app, BenchOptions& o, const std::string& default_preset) {
    o.preset = default_preset;
    app->add_option("--preset", o.preset, "Named grid")->check(CLI::IsMember(presets::names()))->capture_default_str();
    app->add_flag("--full", o.full, "Use the full grid instead of the -desk variant");
    app->add_option("--trials", o.trials, "Override the number of trials")->check(CLI::PositiveNumber);
    app->add_option("--seed", o.seed, "Base seed")->envname("ROBUSTCP_SEED")->capture_default_str();
    app->add_option("--threads", o.threads, "Worker threads for trials")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_flag("--exact-naive", o.exact_naive, "Recompute estimators from scratch on every prefix");
    app->add_option("--out-dir", o.out_dir, "Directory for CSV/JSON reports");
    add_estimator_options(app, o.est, false);
}

// Reads flat `key = value` files and files each key under the subcommand
// that was actually invoked, so `alpha = 1.2` reaches `simulate stable`.
class LeafConfig : public CLI::ConfigTOML {
public:
    explicit LeafConfig(const CLI::App* root) : root_(root) {}

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        auto items = CLI::ConfigTOML::from_config(input);
        std::vector<std::string> path;
        for (const CLI::App* app = root_; app != nullptr;) {
            const auto active = app->get_subcommands();
            app = active.empty() ? nullptr : active.front();
            if (app != nullptr) {
                path.push_back(app->get_name());
            }
        }
        for (auto& item : items) {
            if (item.parents.empty()) {
                item.parents = path;
            }
        }
        return items;
    }

private:
    const CLI::App* root_;
};

void print_error(const std::string& category, const std::string& message) {
    std::cerr << json{{"error", category}, {"message", message}}.dump() << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust change-point detection for heavy-tailed series"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "robustcp 1.0.0");
    app.fallthrough();
    app.set_config("--config", "", "Flat key = value option file for the invoked subcommand");
    app.config_formatter(std::make_shared<LeafConfig>(&app));

    DetectOptions det;
    auto* detect_cmd = app.add_subcommand("detect", "Detect a single change point in a series");
    auto* input_opt = detect_cmd->add_option("--input", det.input, "CSV file with the series");
    detect_cmd->add_option("--column", det.column, "1-based column index")->capture_default_str();
    detect_cmd->add_option("--column-name", det.column_name, "Column header to select");
    auto* gen_opt = detect_cmd->add_option("--generate", det.generate, "Simulate the series instead of reading it")
                        ->check(CLI::IsMember({"stable", "mixture"}));
    input_opt->excludes(gen_opt);
    add_stable_options(detect_cmd, det.stable);
    add_mixture_options(detect_cmd, det.mixture);
    add_series_options(detect_cmd, det.series);
    detect_cmd->add_option("--method", det.method, "Detector")->check(CLI::IsMember({"icss", "ols"}))->capture_default_str();
    add_estimator_options(detect_cmd, det.est, true);
    detect_cmd->add_option("--orientation", det.orientation, "Orientation correction (auto: on for robust estimators)")
        ->check(CLI::IsMember({"auto", "on", "off"}))
        ->capture_default_str();
    detect_cmd->add_option("--head-len", det.head_len, "Head length of the constant-prefix check")->capture_default_str();
    detect_cmd->add_option("--threshold", det.threshold, "Threshold of the constant-prefix check")->capture_default_str();
    detect_cmd->add_flag("--exact-naive", det.exact_naive, "Recompute estimators from scratch on every prefix");
    detect_cmd->add_option("--preprocess", det.preprocess, "Steps, e.g. log-returns,diff:1,agg:10:median");
    detect_cmd->add_option("--out-dir", det.out_dir, "Directory for detection.json and trace.csv");

    SimulateOptions sim;
    auto* simulate_cmd = app.add_subcommand("simulate", "Write a synthetic series with a known change point");
    simulate_cmd->require_subcommand(1);
    auto* stable_cmd = simulate_cmd->add_subcommand("stable", "Symmetric alpha-stable with a scale change");
    auto* mixture_cmd = simulate_cmd->add_subcommand("mixture", "Gaussian with spikes and a scale change");
    for (auto* cmd : {stable_cmd, mixture_cmd}) {
        add_series_options(cmd, sim.series);
        cmd->add_option("--out", sim.out, "Output CSV (stdout if omitted)");
    }
    add_stable_options(stable_cmd, sim.stable);
    add_mixture_options(mixture_cmd, sim.mixture);

    BenchOptions mae_opts;
    BenchOptions timing_opts;
    auto* bench_cmd = app.add_subcommand("bench", "Monte Carlo accuracy and timing studies");
    bench_cmd->require_subcommand(1);
    auto* mae_cmd = bench_cmd->add_subcommand("mae", "Mean absolute error tables");
    auto* timing_cmd = bench_cmd->add_subcommand("timing", "Wall-time scaling study");
    add_bench_options(mae_cmd, mae_opts, "paper-table4-desk");
    add_bench_options(timing_cmd, timing_opts, "paper-timing-desk");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error("UsageError", e.what());
        return kUsageError;
    }

    try {
        if (detect_cmd->parsed()) {
            if (det.input.empty() && det.generate.empty()) {
                print_error("UsageError", "detect needs --input or --generate");
                return kUsageError;
            }
            return run_detect(det);
        }
        if (stable_cmd->parsed()) {
            return write_series(simulate_stable(sim.stable, sim.series), sim.out);
        }
        if (mixture_cmd->parsed()) {
            return write_series(simulate_mixture(sim.mixture, sim.series), sim.out);
        }
        if (mae_cmd->parsed()) {
            return run_bench_mae(mae_opts);
        }
        if (timing_cmd->parsed()) {
            return run_bench_timing(timing_opts);
        }
    } catch (const Error& e) {
        print_error(std::string(to_string(e.code())), e.what());
        return kLibraryError;
    } catch (const std::exception& e) {
        print_error("InternalError", e.what());
        return kLibraryError;
    }
    return 0;
}
