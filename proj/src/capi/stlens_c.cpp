#include "stlens/stlens.h"

#include "stlens/config.hpp"
#include "stlens/ensemble.hpp"
#include "stlens/error.hpp"
#include "stlens/evaluation.hpp"
#include "stlens/plot.hpp"
#include "stlens/series.hpp"
#include "stlens/stl.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <sstream>

struct stlens_config {
    stlens::RunConfig config;
};

struct stlens_series {
    stlens::TimeSeries series;
};

struct stlens_decomposition {
    stlens::DecomposedSeries parts;
};

struct stlens_pipeline {
    stlens::FittedPipeline pipeline;
};

struct stlens_forecast {
    stlens::ForecastResult result;
    std::optional<stlens::TimeSeries> observations;
};

struct stlens_grid {
    std::vector<stlens::GridResult> results;
    std::string lag;
    int horizon = 1;
    std::string selection;
};

struct stlens_report {
    stlens::Comparison comparison;
};

namespace {

thread_local std::string g_last_error;

stlens_status to_status(stlens::ErrorCode code) {
    return static_cast<stlens_status>(static_cast<int>(code));
}

template <class F>
stlens_status guarded(F&& f) {
    try {
        f();
        g_last_error.clear();
        return STLENS_OK;
    } catch (const stlens::Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return STLENS_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return STLENS_ERR_INTERNAL;
    }
}

template <class T>
void need(const T* p, const char* what) {
    stlens::require(p != nullptr, stlens::ErrorCode::InvalidArgument, std::string(what) + " must not be null");
}

void copy_out(const std::vector<double>& v, double* out, std::size_t cap) {
    need(out, "output buffer");
    stlens::require(cap >= v.size(), stlens::ErrorCode::InvalidArgument,
                    "output buffer holds " + std::to_string(cap) + " values, " + std::to_string(v.size()) + " needed");
    std::copy(v.begin(), v.end(), out);
}

std::ofstream open_out(const char* path) {
    need(path, "path");
    std::ofstream out(path, std::ios::binary);
    stlens::require(out.good(), stlens::ErrorCode::Io, std::string("cannot write ") + path);
    return out;
}

void finish(std::ofstream& out, const char* path) {
    out.flush();
    stlens::require(out.good(), stlens::ErrorCode::Io, std::string("write failed for ") + path);
}

std::string fmt(double v) {
    return std::isfinite(v) ? stlens::format_double(v) : std::string();
}

std::vector<stlens::LearnerKind> parse_kinds(const char* text) {
    if (text == nullptr || *text == '\0') {
        return {stlens::kAllLearnerKinds.begin(), stlens::kAllLearnerKinds.end()};
    }
    std::vector<stlens::LearnerKind> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item == "all") {
            out.insert(out.end(), stlens::kAllLearnerKinds.begin(), stlens::kAllLearnerKinds.end());
        } else {
            out.push_back(stlens::parse_kind(item));
        }
    }
    stlens::require(!out.empty(), stlens::ErrorCode::InvalidArgument, "empty candidate list");
    return out;
}

} // namespace

extern "C" {

const char* stlens_version(void) {
    return "1.0.0";
}

const char* stlens_status_name(stlens_status status) {
    if (status == STLENS_OK) return "OK";
    if (status < STLENS_ERR_INVALID_ARGUMENT || status > STLENS_ERR_INTERNAL) return "UNKNOWN";
    return stlens::error_code_name(static_cast<stlens::ErrorCode>(status));
}

const char* stlens_last_error(void) {
    return g_last_error.c_str();
}

stlens_status stlens_config_create(stlens_config** out) {
    return guarded([&] {
        need(out, "out");
        *out = new stlens_config{};
    });
}

void stlens_config_destroy(stlens_config* config) {
    delete config;
}

stlens_status stlens_config_load_file(stlens_config* config, const char* path) {
    return guarded([&] {
        need(config, "config");
        need(path, "path");
        config->config.load_file(path);
    });
}

stlens_status stlens_config_set(stlens_config* config, const char* key, const char* value) {
    return guarded([&] {
        need(config, "config");
        need(key, "key");
        need(value, "value");
        config->config.set(key, value);
    });
}

stlens_status stlens_config_get(const stlens_config* config, const char* key, char* buf, size_t cap, size_t* needed) {
    return guarded([&] {
        need(config, "config");
        need(key, "key");
        const std::string v = config->config.get(key);
        if (needed) *needed = v.size() + 1;
        stlens::require(buf != nullptr && cap >= v.size() + 1, stlens::ErrorCode::InvalidArgument,
                        "buffer too small for config value");
        std::memcpy(buf, v.c_str(), v.size() + 1);
    });
}

stlens_status stlens_config_write(const stlens_config* config, const char* path) {
    return guarded([&] {
        need(config, "config");
        auto out = open_out(path);
        for (const auto& [k, v] : config->config.entries()) out << k << " = " << v << '\n';
        finish(out, path);
    });
}

stlens_status stlens_series_load_csv(const stlens_config* config, const char* path, stlens_series** out) {
    return guarded([&] {
        need(config, "config");
        need(path, "path");
        need(out, "out");
        *out = new stlens_series{stlens::load_csv(path, config->config.schema, config->config.period)};
    });
}

stlens_status stlens_series_from_values(int start_year, int start_month, int period, const double* values, size_t count,
                                        stlens_series** out) {
    return guarded([&] {
        need(out, "out");
        stlens::require(values != nullptr || count == 0, stlens::ErrorCode::InvalidArgument, "values must not be null");
        stlens::require(start_month >= 1 && start_month <= 12, stlens::ErrorCode::InvalidArgument, "start month must be 1..12");
        *out = new stlens_series{stlens::TimeSeries(stlens::YearMonth{start_year, start_month}, period,
                                                    std::vector<double>(values, values + count))};
    });
}

stlens_status stlens_series_synthetic(const stlens_config* config, stlens_series** out) {
    return guarded([&] {
        need(config, "config");
        need(out, "out");
        stlens::SyntheticSpec spec = config->config.synth;
        spec.seed = config->config.seed;
        *out = new stlens_series{stlens::gen_synthetic(spec)};
    });
}

void stlens_series_destroy(stlens_series* series) {
    delete series;
}

size_t stlens_series_length(const stlens_series* series) {
    return series ? series->series.size() : 0;
}

stlens_status stlens_series_values(const stlens_series* series, double* out, size_t cap) {
    return guarded([&] {
        need(series, "series");
        const auto v = series->series.values();
        copy_out(std::vector<double>(v.begin(), v.end()), out, cap);
    });
}

stlens_status stlens_series_write_csv(const stlens_config* config, const stlens_series* series, const char* path) {
    return guarded([&] {
        need(config, "config");
        need(series, "series");
        need(path, "path");
        stlens::write_csv(series->series, path, config->config.schema);
    });
}

stlens_status stlens_summarize(const stlens_series* series, const stlens_config* config, stlens_summary out[3]) {
    return guarded([&] {
        need(series, "series");
        need(config, "config");
        need(out, "out");
        const auto data = stlens::lag_embed(series->series, config->config.lag);
        const auto split = stlens::chrono_split(data, config->config.split);
        const std::array<const stlens::Vector*, 3> parts{&data.targets, &split.train.targets, &split.test.targets};
        for (std::size_t i = 0; i < 3; ++i) {
            stlens::require(parts[i]->size() > 1, stlens::ErrorCode::InsufficientData, "summary: a partition has fewer than 2 rows");
            const auto s = stlens::summary_stats(std::span<const double>(parts[i]->data(), static_cast<std::size_t>(parts[i]->size())));
            out[i] = stlens_summary{s.count, s.max, s.min, s.mean, s.median, s.std};
        }
    });
}

stlens_status stlens_summary_write_csv(const stlens_summary summaries[3], const char* path) {
    return guarded([&] {
        need(summaries, "summaries");
        auto out = open_out(path);
        out << "set,samples,max,min,mean,median,std\n";
        const char* names[3] = {"all", "train", "test"};
        for (int i = 0; i < 3; ++i) {
            const auto& s = summaries[i];
            out << names[i] << ',' << s.count << ',' << fmt(s.max) << ',' << fmt(s.min) << ',' << fmt(s.mean) << ','
                << fmt(s.median) << ',' << fmt(s.std_dev) << '\n';
        }
        finish(out, path);
    });
}

stlens_status stlens_decompose(const stlens_series* series, const stlens_config* config, stlens_decomposition** out) {
    return guarded([&] {
        need(series, "series");
        need(config, "config");
        need(out, "out");
        stlens::StlConfig stl = config->config.stl;
        stl.period = config->config.period;
        *out = new stlens_decomposition{stlens::stl_decompose(series->series, stl)};
    });
}

void stlens_decomposition_destroy(stlens_decomposition* parts) {
    delete parts;
}

size_t stlens_decomposition_length(const stlens_decomposition* parts) {
    return parts ? parts->parts.size() : 0;
}

stlens_status stlens_decomposition_component(const stlens_decomposition* parts, int which, double* out, size_t cap) {
    return guarded([&] {
        need(parts, "decomposition");
        const auto& p = parts->parts;
        switch (which) {
        case STLENS_OBSERVED: copy_out(p.observed, out, cap); break;
        case STLENS_SEASONAL: copy_out(p.seasonal, out, cap); break;
        case STLENS_TREND: copy_out(p.trend, out, cap); break;
        case STLENS_REMAINDER: copy_out(p.remainder, out, cap); break;
        default: stlens::fail(stlens::ErrorCode::InvalidArgument, "unknown component selector");
        }
    });
}

stlens_status stlens_decomposition_write_csv(const stlens_decomposition* parts, const char* path) {
    return guarded([&] {
        need(parts, "decomposition");
        auto out = open_out(path);
        const auto& p = parts->parts;
        out << "date,observed,seasonal,trend,remainder\n";
        for (std::size_t i = 0; i < p.size(); ++i) {
            out << p.start.plus_months(static_cast<long>(i)).to_string() << ',' << fmt(p.observed[i]) << ','
                << fmt(p.seasonal[i]) << ',' << fmt(p.trend[i]) << ',' << fmt(p.remainder[i]) << '\n';
        }
        finish(out, path);
    });
}

stlens_status stlens_decomposition_write_svg(const stlens_decomposition* parts, const char* path) {
    return guarded([&] {
        need(parts, "decomposition");
        need(path, "path");
        stlens::write_decomposition_svg(parts->parts, path);
    });
}

stlens_status stlens_pipeline_fit(const stlens_series* series, const stlens_config* config, stlens_pipeline** out) {
    return guarded([&] {
        need(series, "series");
        need(config, "config");
        need(out, "out");
        *out = new stlens_pipeline{stlens::fit_pipeline(config->config.variant(), series->series, config->config.split)};
    });
}

void stlens_pipeline_destroy(stlens_pipeline* pipeline) {
    delete pipeline;
}

size_t stlens_pipeline_model_count(const stlens_pipeline* pipeline) {
    return pipeline ? pipeline->pipeline.models().size() : 0;
}

size_t stlens_pipeline_pca_components(const stlens_pipeline* pipeline, size_t model) {
    if (!pipeline || model >= pipeline->pipeline.models().size()) return 0;
    return pipeline->pipeline.models()[model].pca().kept();
}

size_t stlens_pipeline_train_rows(const stlens_pipeline* pipeline) {
    return pipeline ? pipeline->pipeline.train_rows() - pipeline->pipeline.first_train_row() : 0;
}

stlens_status stlens_pipeline_write_csv(const stlens_pipeline* pipeline, const char* path) {
    return guarded([&] {
        need(pipeline, "pipeline");
        auto out = open_out(path);
        const auto& p = pipeline->pipeline;
        out << "variant,component,learner,train_rows,lag,pca_components,pca_cumulative_variance\n";
        for (std::size_t i = 0; i < p.models().size(); ++i) {
            const auto& m = p.models()[i];
            out << p.variant().name << ',' << p.model_names()[i] << ",\"" << m.model().spec().to_string() << "\","
                << m.train_rows() << ',' << m.lag() << ',' << m.pca().kept() << ',' << fmt(m.pca().cumulative_ratio()) << '\n';
        }
        finish(out, path);
    });
}

stlens_status stlens_pipeline_write_variance_csv(const stlens_pipeline* pipeline, const char* path) {
    return guarded([&] {
        need(pipeline, "pipeline");
        auto out = open_out(path);
        const auto& p = pipeline->pipeline;
        out << "component,pc,ratio,cumulative,kept\n";
        for (std::size_t i = 0; i < p.models().size(); ++i) {
            const auto& pca = p.models()[i].pca();
            double cum = 0.0;
            for (std::size_t k = 0; k < pca.all_variance_ratios().size(); ++k) {
                cum += pca.all_variance_ratios()[k];
                out << p.model_names()[i] << ',' << k + 1 << ',' << fmt(pca.all_variance_ratios()[k]) << ',' << fmt(cum) << ','
                    << (k < pca.kept() ? 1 : 0) << '\n';
            }
        }
        finish(out, path);
    });
}

stlens_status stlens_forecast_test(const stlens_pipeline* pipeline, int horizon, stlens_forecast** out) {
    return guarded([&] {
        need(pipeline, "pipeline");
        need(out, "out");
        *out = new stlens_forecast{stlens::forecast_test(pipeline->pipeline, horizon), std::nullopt};
    });
}

stlens_status stlens_forecast_all(const stlens_pipeline* pipeline, int horizon, stlens_forecast** out) {
    return guarded([&] {
        need(pipeline, "pipeline");
        need(out, "out");
        const auto& p = pipeline->pipeline;
        const std::size_t begin = stlens::first_forecastable_index(p.variant(), horizon);
        *out = new stlens_forecast{stlens::forecast_recursive(p, horizon, begin, p.series().size()), std::nullopt};
    });
}

stlens_status stlens_forecast_range(const stlens_pipeline* pipeline, int horizon, size_t begin, size_t end,
                                    const stlens_series* observations, stlens_forecast** out) {
    return guarded([&] {
        need(pipeline, "pipeline");
        need(out, "out");
        const stlens::TimeSeries* obs = observations ? &observations->series : nullptr;
        *out = new stlens_forecast{stlens::forecast_recursive(pipeline->pipeline, horizon, begin, end, obs), std::nullopt};
    });
}

void stlens_forecast_destroy(stlens_forecast* forecast) {
    delete forecast;
}

size_t stlens_forecast_length(const stlens_forecast* forecast) {
    return forecast ? forecast->result.recomposed.size() : 0;
}

size_t stlens_forecast_first_index(const stlens_forecast* forecast) {
    return forecast && !forecast->result.timestamps.empty() ? forecast->result.timestamps.front() : 0;
}

stlens_status stlens_forecast_values(const stlens_forecast* forecast, double* out, size_t cap) {
    return guarded([&] {
        need(forecast, "forecast");
        copy_out(forecast->result.recomposed, out, cap);
    });
}

stlens_status stlens_forecast_write_csv(const stlens_forecast* forecast, const stlens_pipeline* pipeline, const char* path) {
    return guarded([&] {
        need(forecast, "forecast");
        auto out = open_out(path);
        const auto& r = forecast->result;
        const std::size_t test_start = pipeline ? pipeline->pipeline.first_test_index() : 0;
        out << "date,set,horizon,observed,forecast";
        for (const auto& name : r.component_names) out << ',' << name;
        out << '\n';
        for (std::size_t i = 0; i < r.recomposed.size(); ++i) {
            const char* set = pipeline == nullptr ? "" : (r.timestamps[i] < test_start ? "train" : "test");
            out << r.months[i].to_string() << ',' << set << ',' << r.horizon << ',' << fmt(r.observed[i]) << ','
                << fmt(r.recomposed[i]);
            for (const auto& c : r.components) out << ',' << fmt(c[i]);
            out << '\n';
        }
        finish(out, path);
    });
}

stlens_status stlens_forecast_write_svg(const stlens_series* observed, const stlens_forecast* h1, const stlens_forecast* h2,
                                        size_t split_index, const char* path) {
    return guarded([&] {
        need(observed, "observed");
        need(path, "path");
        std::vector<stlens::PlotLine> lines;
        if (h1) {
            lines.push_back(stlens::PlotLine{"h = 1", "#1f4fd1", true, stlens_forecast_first_index(h1), h1->result.recomposed});
        }
        if (h2) {
            lines.push_back(stlens::PlotLine{"h = 2", "#d11f1f", true, stlens_forecast_first_index(h2), h2->result.recomposed});
        }
        std::optional<std::size_t> split;
        if (split_index > 0) split = split_index;
        stlens::write_forecast_svg(observed->series, lines, split, path);
    });
}

stlens_status stlens_gridsearch(const stlens_series* series, const stlens_config* config, const char* seasonal,
                                const char* trend, const char* remainder, stlens_grid** out) {
    return guarded([&] {
        need(series, "series");
        need(config, "config");
        need(out, "out");
        const auto& c = config->config;
        const auto ks = parse_kinds(seasonal);
        const auto kt = parse_kinds(trend);
        const auto kr = parse_kinds(remainder);
        const auto candidates = stlens::GridCandidates::from_kinds(ks, kt, kr);
        stlens::PipelineVariant base = c.variant();
        auto grid = std::make_unique<stlens_grid>();
        grid->results = stlens::grid_search(candidates, series->series, base, c.grid());
        grid->lag = std::to_string(c.lag);
        grid->horizon = c.horizon;
        grid->selection = c.get("selection");
        *out = grid.release();
    });
}

void stlens_grid_destroy(stlens_grid* grid) {
    delete grid;
}

size_t stlens_grid_count(const stlens_grid* grid) {
    return grid ? grid->results.size() : 0;
}

stlens_status stlens_grid_entry(const stlens_grid* grid, size_t index, char* label, size_t cap, double* score) {
    return guarded([&] {
        need(grid, "grid");
        stlens::require(index < grid->results.size(), stlens::ErrorCode::InvalidArgument, "grid index out of range");
        const auto& r = grid->results[index];
        if (score) *score = r.score;
        if (label) {
            const std::string text = r.assignment.label();
            stlens::require(cap >= text.size() + 1, stlens::ErrorCode::InvalidArgument, "label buffer too small");
            std::memcpy(label, text.c_str(), text.size() + 1);
        }
    });
}

stlens_status stlens_grid_write_csv(const stlens_grid* grid, const char* path) {
    return guarded([&] {
        need(grid, "grid");
        auto out = open_out(path);
        out << "rank,seasonal,trend,remainder,horizon,selection,rrmse,error\n";
        for (std::size_t i = 0; i < grid->results.size(); ++i) {
            const auto& r = grid->results[i];
            std::string err = r.error.value_or("");
            for (auto& ch : err) {
                if (ch == '"' || ch == '\n') ch = '\'';
            }
            out << i + 1 << ",\"" << r.assignment.seasonal.to_string() << "\",\"" << r.assignment.trend.to_string() << "\",\""
                << r.assignment.remainder.to_string() << "\"," << grid->horizon << ',' << grid->selection << ','
                << (std::isfinite(r.score) ? stlens::format_double(r.score) : std::string()) << ",\"" << err << "\"\n";
        }
        finish(out, path);
    });
}

stlens_status stlens_evaluate(const stlens_series* series, const stlens_config* config, stlens_report** out) {
    return guarded([&] {
        need(series, "series");
        need(config, "config");
        need(out, "out");
        const auto& c = config->config;
        *out = new stlens_report{stlens::run_comparison(series->series, c.horizon, c.comparison())};
    });
}

void stlens_report_destroy(stlens_report* report) {
    delete report;
}

size_t stlens_report_row_count(const stlens_report* report) {
    return report ? report->comparison.report.rows.size() : 0;
}

stlens_status stlens_report_row_at(const stlens_report* report, size_t index, stlens_report_row* out) {
    return guarded([&] {
        need(report, "report");
        need(out, "out");
        const auto& rows = report->comparison.report.rows;
        stlens::require(index < rows.size(), stlens::ErrorCode::InvalidArgument, "report row out of range");
        const auto& r = rows[index];
        *out = stlens_report_row{r.model.c_str(), r.horizon, r.metrics.rrmse, r.metrics.r_squared, r.dm ? 1 : 0,
                                 r.dm ? r.dm->statistic : std::numeric_limits<double>::quiet_NaN(),
                                 r.dm ? r.dm->p_value : std::numeric_limits<double>::quiet_NaN()};
    });
}

stlens_status stlens_report_write_csv(const stlens_report* report, int with_reference, const char* path) {
    return guarded([&] {
        need(report, "report");
        auto out = open_out(path);
        stlens::write_report_csv(report->comparison.report, out, with_reference != 0);
        finish(out, path);
    });
}

stlens_status stlens_report_write_pca_csv(const stlens_report* report, const char* path) {
    return guarded([&] {
        need(report, "report");
        auto out = open_out(path);
        out << "model,component,pca_components\n";
        for (const auto& e : report->comparison.entries) {
            for (std::size_t i = 0; i < e.pca_components.size(); ++i) {
                out << e.label << ',' << e.forecast.component_names[i] << ',' << e.pca_components[i] << '\n';
            }
        }
        finish(out, path);
    });
}

stlens_status stlens_dm_test(const double* errors_a, const double* errors_b, size_t count, int horizon, int hln,
                             stlens_dm_result* out) {
    return guarded([&] {
        need(errors_a, "errors_a");
        need(errors_b, "errors_b");
        need(out, "out");
        const auto r = stlens::dm_test(std::span<const double>(errors_a, count), std::span<const double>(errors_b, count),
                                       stlens::DmOptions{horizon, hln != 0});
        *out = stlens_dm_result{r.statistic, r.p_value, r.horizon, r.n};
    });
}

} // extern "C"
