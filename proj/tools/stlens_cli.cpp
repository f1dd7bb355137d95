// Command-line frontend. Links only the C interface of libstlens.
#include "stlens/stlens.h"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct CliError {
    stlens_status status;
    std::string message;
};

void check(stlens_status status) {
    if (status != STLENS_OK) throw CliError{status, stlens_last_error()};
}

template <class T, void (*Destroy)(T*)>
struct Handle {
    T* ptr = nullptr;
    Handle() = default;
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    ~Handle() { Destroy(ptr); }
    T** out() { return &ptr; }
    T* get() const { return ptr; }
};

using Config = Handle<stlens_config, stlens_config_destroy>;
using Series = Handle<stlens_series, stlens_series_destroy>;
using Decomposition = Handle<stlens_decomposition, stlens_decomposition_destroy>;
using Pipeline = Handle<stlens_pipeline, stlens_pipeline_destroy>;
using Forecast = Handle<stlens_forecast, stlens_forecast_destroy>;
using Grid = Handle<stlens_grid, stlens_grid_destroy>;
using Report = Handle<stlens_report, stlens_report_destroy>;

// Files written by the running command, removed again if it fails.
std::vector<fs::path> g_written;

struct Options {
    std::string config_file;
    std::vector<std::string> sets;
    std::string data, preset, seasonal, trend, remainder, model, out, selection;
    std::string cand_seasonal, cand_trend, cand_remainder;
    std::string input;
    int lag = 0;
    int horizon = 0;
    double split = 0.0;
    double pca = 0.0;
    long long seed = -1;
    int jobs = -1;
    bool explain_variance = false;
    bool train_only = false;
    bool drop_remainder = false;
    bool dm_correction = false;
    int synth_n = 0;
    int synth_period = 0;
    double synth_slope = NAN;
    double synth_amplitude = NAN;
    double synth_noise = NAN;
};

std::string config_value(const Config& c, const char* key) {
    size_t needed = 0;
    stlens_config_get(c.get(), key, nullptr, 0, &needed);
    std::string buf(needed, '\0');
    check(stlens_config_get(c.get(), key, buf.data(), buf.size(), &needed));
    buf.resize(needed - 1);
    return buf;
}

void set(Config& c, const std::string& key, const std::string& value) {
    check(stlens_config_set(c.get(), key.c_str(), value.c_str()));
}

std::string num(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

// Config file first, then --set pairs, then dedicated flags.
void build_config(Config& c, const Options& o) {
    check(stlens_config_create(c.out()));
    if (const char* dir = std::getenv("STLENS_DATA_DIR"); dir != nullptr && *dir != '\0') {
        set(c, "data", (fs::path(dir) / "amazon_fire_spots.csv").string());
    } else {
        set(c, "data", "data/amazon_fire_spots.csv");
    }
    if (!o.config_file.empty()) check(stlens_config_load_file(c.get(), o.config_file.c_str()));
    for (const auto& kv : o.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw CliError{STLENS_ERR_PARSE, "--set expects key=value, got '" + kv + "'"};
        set(c, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!o.data.empty()) set(c, "data", o.data);
    if (!o.preset.empty()) set(c, "preset", o.preset);
    if (!o.seasonal.empty()) set(c, "seasonal", o.seasonal);
    if (!o.trend.empty()) set(c, "trend", o.trend);
    if (!o.remainder.empty()) set(c, "remainder", o.remainder);
    if (!o.model.empty()) set(c, "model", o.model);
    if (!o.out.empty()) set(c, "out", o.out);
    if (!o.selection.empty()) set(c, "selection", o.selection);
    if (o.lag > 0) set(c, "lag", std::to_string(o.lag));
    if (o.horizon > 0) set(c, "horizon", std::to_string(o.horizon));
    if (o.split > 0.0) set(c, "split", num(o.split));
    if (o.pca > 0.0) set(c, "pca", num(o.pca));
    if (o.seed >= 0) set(c, "seed", std::to_string(o.seed));
    if (o.jobs >= 0) set(c, "jobs", std::to_string(o.jobs));
    if (o.train_only) set(c, "decomposition", "causal");
    if (o.drop_remainder) set(c, "drop_remainder", "true");
    if (o.dm_correction) set(c, "dm_correction", "true");
    if (o.synth_n > 0) set(c, "synth.n", std::to_string(o.synth_n));
    if (o.synth_period > 0) set(c, "synth.period", std::to_string(o.synth_period));
    if (!std::isnan(o.synth_slope)) set(c, "synth.slope", num(o.synth_slope));
    if (!std::isnan(o.synth_amplitude)) set(c, "synth.amplitude", num(o.synth_amplitude));
    if (!std::isnan(o.synth_noise)) set(c, "synth.noise", num(o.synth_noise));
}

fs::path output(const Config& c, const std::string& name) {
    const fs::path dir = config_value(c, "out");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw CliError{STLENS_ERR_IO, "cannot create output directory " + dir.string() + ": " + ec.message()};
    const fs::path p = dir / name;
    g_written.push_back(p);
    return p;
}

void load(const Config& c, Series& s) {
    const std::string path = config_value(c, "data");
    check(stlens_series_load_csv(c.get(), path.c_str(), s.out()));
}

void announce(const fs::path& p) {
    std::cout << "wrote " << p.string() << '\n';
}

void cmd_summarize(const Config& c) {
    Series s;
    load(c, s);
    stlens_summary sums[3];
    check(stlens_summarize(s.get(), c.get(), sums));
    const auto path = output(c, "summary.csv");
    check(stlens_summary_write_csv(sums, path.string().c_str()));
    const char* names[3] = {"all", "train", "test"};
    std::printf("%-6s %8s %10s %8s %12s %10s %12s\n", "set", "samples", "max", "min", "mean", "median", "std");
    for (int i = 0; i < 3; ++i) {
        std::printf("%-6s %8zu %10.0f %8.0f %12.2f %10.1f %12.2f\n", names[i], sums[i].count, sums[i].max, sums[i].min,
                    sums[i].mean, sums[i].median, sums[i].std_dev);
    }
    announce(path);
}

void cmd_decompose(const Config& c) {
    Series s;
    load(c, s);
    Decomposition d;
    check(stlens_decompose(s.get(), c.get(), d.out()));
    const auto csv = output(c, "decomposition.csv");
    check(stlens_decomposition_write_csv(d.get(), csv.string().c_str()));
    const auto svg = output(c, "decomposition.svg");
    check(stlens_decomposition_write_svg(d.get(), svg.string().c_str()));
    announce(csv);
    announce(svg);
}

void write_variance(const Config& c, const Pipeline& p) {
    const auto path = output(c, "pca_variance.csv");
    check(stlens_pipeline_write_variance_csv(p.get(), path.string().c_str()));
    announce(path);
}

void cmd_fit(const Config& c, const Options& o) {
    Series s;
    load(c, s);
    Pipeline p;
    check(stlens_pipeline_fit(s.get(), c.get(), p.out()));
    const auto path = output(c, "model.csv");
    check(stlens_pipeline_write_csv(p.get(), path.string().c_str()));
    std::cout << "trained " << stlens_pipeline_model_count(p.get()) << " model(s) on " << stlens_pipeline_train_rows(p.get())
              << " rows; PCA components:";
    for (size_t i = 0; i < stlens_pipeline_model_count(p.get()); ++i) std::cout << ' ' << stlens_pipeline_pca_components(p.get(), i);
    std::cout << '\n';
    announce(path);
    if (o.explain_variance) write_variance(c, p);
}

void cmd_forecast(const Config& c, const Options& o) {
    Series s;
    load(c, s);
    const int horizon = std::stoi(config_value(c, "horizon"));
    // Overlay both horizons; without an explicit variant each horizon uses its ensemble preset.
    Forecast f[2];
    Pipeline chosen;
    size_t split = 0;
    for (int h = 1; h <= 2; ++h) {
        Config ch;
        build_config(ch, o);
        set(ch, "horizon", std::to_string(h));
        Pipeline p;
        check(stlens_pipeline_fit(s.get(), ch.get(), p.out()));
        check(stlens_forecast_all(p.get(), h, f[h - 1].out()));
        if (h == horizon) {
            const auto csv = output(c, "forecast.csv");
            check(stlens_forecast_write_csv(f[h - 1].get(), p.get(), csv.string().c_str()));
            announce(csv);
            if (o.explain_variance) write_variance(c, p);
            split = stlens_pipeline_train_rows(p.get()) + static_cast<size_t>(std::stoi(config_value(c, "lag")));
        }
    }
    const auto svg = output(c, "forecast.svg");
    check(stlens_forecast_write_svg(s.get(), f[0].get(), f[1].get(), split, svg.string().c_str()));
    announce(svg);
}

void cmd_gridsearch(const Config& c, const Options& o) {
    Series s;
    load(c, s);
    Grid g;
    auto cand = [](const std::string& v) { return v.empty() ? nullptr : v.c_str(); };
    check(stlens_gridsearch(s.get(), c.get(), cand(o.cand_seasonal), cand(o.cand_trend), cand(o.cand_remainder), g.out()));
    const auto path = output(c, "gridsearch_h" + config_value(c, "horizon") + ".csv");
    check(stlens_grid_write_csv(g.get(), path.string().c_str()));
    const size_t shown = std::min<size_t>(5, stlens_grid_count(g.get()));
    for (size_t i = 0; i < shown; ++i) {
        char label[128];
        double score = 0.0;
        check(stlens_grid_entry(g.get(), i, label, sizeof label, &score));
        std::printf("%2zu  %-28s %.6g\n", i + 1, label, score);
    }
    std::cout << stlens_grid_count(g.get()) << " assignments evaluated\n";
    announce(path);
}

void cmd_evaluate(const Config& c) {
    Series s;
    load(c, s);
    Report r;
    check(stlens_evaluate(s.get(), c.get(), r.out()));
    const std::string h = config_value(c, "horizon");
    const auto path = output(c, "evaluation_h" + h + ".csv");
    check(stlens_report_write_csv(r.get(), 1, path.string().c_str()));
    const auto pca = output(c, "pca_components_h" + h + ".csv");
    check(stlens_report_write_pca_csv(r.get(), pca.string().c_str()));
    std::printf("%-16s %10s %10s %12s %10s\n", "model", "rrmse", "r2", "dm", "p_value");
    for (size_t i = 0; i < stlens_report_row_count(r.get()); ++i) {
        stlens_report_row row;
        check(stlens_report_row_at(r.get(), i, &row));
        if (row.has_dm) {
            std::printf("%-16s %10.4f %10.4f %12.4g %10.4g\n", row.model, row.rrmse, row.r_squared, row.dm_statistic, row.dm_p_value);
        } else {
            std::printf("%-16s %10.4f %10.4f %12s %10s\n", row.model, row.rrmse, row.r_squared, "-", "-");
        }
    }
    announce(path);
    announce(pca);
}

// Reads two error columns from a CSV with a header line.
void read_errors(const std::string& path, std::vector<double>& a, std::vector<double>& b) {
    std::ifstream in(path);
    if (!in) throw CliError{STLENS_ERR_IO, "cannot open " + path};
    std::string line;
    std::getline(in, line);
    size_t number = 1;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string x, y;
        std::getline(ss, x, ',');
        std::getline(ss, y, ',');
        try {
            size_t px = 0, py = 0;
            const double vx = std::stod(x, &px);
            const double vy = std::stod(y, &py);
            if (px != x.size() || py != y.size()) throw std::invalid_argument("trailing text");
            a.push_back(vx);
            b.push_back(vy);
        } catch (const std::exception&) {
            throw CliError{STLENS_ERR_PARSE, path + ":" + std::to_string(number) + ": expected two numeric columns"};
        }
    }
}

void cmd_dm_test(const Config& c, const Options& o) {
    if (o.input.empty()) throw CliError{STLENS_ERR_INVALID_ARGUMENT, "dm-test needs --input with columns errors_a,errors_b"};
    std::vector<double> a, b;
    read_errors(o.input, a, b);
    stlens_dm_result r;
    const int horizon = std::stoi(config_value(c, "horizon"));
    const bool hln = config_value(c, "dm_correction") == "true";
    check(stlens_dm_test(a.data(), b.data(), a.size(), horizon, hln ? 1 : 0, &r));
    const auto path = output(c, "dm_test.csv");
    std::ofstream out(path);
    out.precision(17);
    out << "n,horizon,statistic,p_value\n" << r.n << ',' << r.horizon << ',' << r.statistic << ',' << r.p_value << '\n';
    if (!out) throw CliError{STLENS_ERR_IO, "write failed for " + path.string()};
    std::printf("DM = %.6g, p = %.6g (n = %zu, h = %d)\n", r.statistic, r.p_value, r.n, r.horizon);
    announce(path);
}

void cmd_synth(const Config& c) {
    Series s;
    check(stlens_series_synthetic(c.get(), s.out()));
    const auto path = output(c, "synthetic_seed" + config_value(c, "seed") + ".csv");
    check(stlens_series_write_csv(c.get(), s.get(), path.string().c_str()));
    announce(path);
}

void common_options(CLI::App* cmd, Options& o) {
    cmd->add_option("-c,--config", o.config_file, "key = value configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--set", o.sets, "override a configuration key (key=value)");
    cmd->add_option("--data", o.data, "input CSV (default $STLENS_DATA_DIR/amazon_fire_spots.csv)");
    cmd->add_option("-o,--out", o.out, "output directory");
    cmd->add_option("--lag", o.lag, "number of lags")->check(CLI::PositiveNumber);
    cmd->add_option("--split", o.split, "training fraction")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--pca", o.pca, "PCA cumulative variance threshold")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--horizon", o.horizon, "forecast horizon (1 or 2)")->check(CLI::Range(1, 2));
    cmd->add_option("--seed", o.seed, "random seed")->check(CLI::NonNegativeNumber);
}

void model_options(CLI::App* cmd, Options& o) {
    cmd->add_option("--preset", o.preset, "stl-ensemble-1, stl-ensemble-2, stl-<kind> or <kind>");
    cmd->add_option("--seasonal", o.seasonal, "learner spec for the seasonal component");
    cmd->add_option("--trend", o.trend, "learner spec for the trend component");
    cmd->add_option("--remainder", o.remainder, "learner spec for the remainder component");
    cmd->add_option("--model", o.model, "learner spec for a nondecomposed pipeline");
    cmd->add_flag("--train-only-decomposition", o.train_only, "decompose only data available at each origin");
    cmd->add_flag("--drop-remainder", o.drop_remainder, "recompose from seasonal and trend forecasts only");
}

int fail_with(const std::string& command, const CliError& e) {
    for (const auto& p : g_written) {
        std::error_code ec;
        fs::remove(p, ec);
    }
    std::string msg = e.message;
    for (auto& ch : msg) {
        if (ch == '\n') ch = ' ';
        if (ch == '"') ch = '\'';
    }
    std::cerr << "error: command=" << command << " code=" << stlens_status_name(e.status) << " message=\"" << msg << "\"\n";
    return static_cast<int>(e.status);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Seasonal-trend decomposition ensembles for monthly series"};
    app.require_subcommand(1);
    Options o;

    auto* summarize = app.add_subcommand("summarize", "dataset statistics after lag embedding and split");
    common_options(summarize, o);
    auto* decompose = app.add_subcommand("decompose", "STL decomposition CSV and plot");
    common_options(decompose, o);
    auto* fitc = app.add_subcommand("fit", "fit the configured pipeline and describe it");
    common_options(fitc, o);
    model_options(fitc, o);
    fitc->add_flag("--explain-variance", o.explain_variance, "write PCA explained-variance table");
    auto* forecast = app.add_subcommand("forecast", "per-month forecasts and overlay plot");
    common_options(forecast, o);
    model_options(forecast, o);
    forecast->add_flag("--explain-variance", o.explain_variance, "write PCA explained-variance table");
    auto* grid = app.add_subcommand("gridsearch", "rank learner assignments per component");
    common_options(grid, o);
    grid->add_flag("--train-only-decomposition", o.train_only, "decompose only data available at each origin");
    grid->add_flag("--drop-remainder", o.drop_remainder, "recompose from seasonal and trend forecasts only");
    grid->add_option("--jobs", o.jobs, "worker threads (default: available cores)")->check(CLI::NonNegativeNumber);
    grid->add_option("--paper-faithful-selection", o.selection, "selection mode: validation or test")
        ->check(CLI::IsMember({"validation", "test"}));
    grid->add_option("--seasonal-candidates", o.cand_seasonal, "comma-separated kinds (default all)");
    grid->add_option("--trend-candidates", o.cand_trend, "comma-separated kinds (default all)");
    grid->add_option("--remainder-candidates", o.cand_remainder, "comma-separated kinds (default all)");
    auto* evaluate = app.add_subcommand("evaluate", "compare ensemble, STL and nondecomposed models on the test set");
    common_options(evaluate, o);
    evaluate->add_flag("--train-only-decomposition", o.train_only, "decompose only data available at each origin");
    evaluate->add_flag("--drop-remainder", o.drop_remainder, "recompose from seasonal and trend forecasts only");
    evaluate->add_flag("--dm-correction", o.dm_correction, "small-sample corrected DM test");
    auto* dm = app.add_subcommand("dm-test", "Diebold-Mariano test on two error columns");
    common_options(dm, o);
    dm->add_option("--input", o.input, "CSV with columns errors_a,errors_b")->required();
    dm->add_flag("--dm-correction", o.dm_correction, "small-sample correction with Student-t reference");
    auto* synth = app.add_subcommand("synth", "write a seeded synthetic seasonal series");
    common_options(synth, o);
    synth->add_option("--n", o.synth_n, "number of observations")->check(CLI::PositiveNumber);
    synth->add_option("--period", o.synth_period, "season length")->check(CLI::PositiveNumber);
    synth->add_option("--slope", o.synth_slope, "trend slope per month");
    synth->add_option("--amplitude", o.synth_amplitude, "seasonal amplitude");
    synth->add_option("--noise", o.synth_noise, "noise standard deviation");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "error: code=INVALID_ARGUMENT message=\"" << e.what() << "\"\n";
        return STLENS_ERR_INVALID_ARGUMENT;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        Config c;
        build_config(c, o);
        if (name == "summarize") cmd_summarize(c);
        else if (name == "decompose") cmd_decompose(c);
        else if (name == "fit") cmd_fit(c, o);
        else if (name == "forecast") cmd_forecast(c, o);
        else if (name == "gridsearch") cmd_gridsearch(c, o);
        else if (name == "evaluate") cmd_evaluate(c);
        else if (name == "dm-test") cmd_dm_test(c, o);
        else if (name == "synth") cmd_synth(c);
        return 0;
    } catch (const std::exception& e) {
        return fail_with(name, CliError{STLENS_ERR_INTERNAL, e.what()});
    } catch (const CliError& e) {
        return fail_with(name, e);
    }
}
