#include "stlens/ensemble.hpp"
#include "stlens/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

namespace stlens {

namespace {

constexpr std::array<Component, 3> kComponents{Component::Seasonal, Component::Trend, Component::Remainder};

Role role_of(Component c) {
    switch (c) {
    case Component::Seasonal: return Role::Seasonal;
    case Component::Trend: return Role::Trend;
    case Component::Remainder: return Role::Remainder;
    }
    return Role::Nondecomposed;
}

const std::vector<double>& component_values(const DecomposedSeries& d, Component c) {
    switch (c) {
    case Component::Seasonal: return d.seasonal;
    case Component::Trend: return d.trend;
    case Component::Remainder: return d.remainder;
    }
    return d.remainder;
}

std::size_t modelled_components(const PipelineVariant& v) {
    if (v.mode == PipelineMode::Nondecomposed) return 1;
    return v.drop_remainder ? 2 : 3;
}

// Re-raises a library error with the failing stage prepended; the code is kept.
template <class F>
auto with_stage(const std::string& stage, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(e.code(), stage + ": " + e.what());
    }
}

void validate_variant(const PipelineVariant& v) {
    require(v.lag >= 1, ErrorCode::InvalidArgument, "pipeline: lag must be at least 1");
    require(v.pca_threshold > 0.0 && v.pca_threshold <= 1.0, ErrorCode::InvalidArgument,
            "pipeline: PCA threshold must lie in (0, 1]");
    if (v.mode == PipelineMode::Nondecomposed) {
        v.single.validate();
    } else {
        for (const auto& s : v.components) s.validate();
    }
}

// Decomposition whose components provide the training rows [.., row_end).
std::optional<DecomposedSeries> training_decomposition(const PipelineVariant& v, const TimeSeries& series,
                                                       std::size_t row_end) {
    if (v.mode == PipelineMode::Nondecomposed) {
        return std::nullopt;
    }
    return with_stage("decompose", [&] {
        if (v.decomposition == DecompositionMode::Full) {
            return stl_decompose(series, v.stl);
        }
        return stl_decompose(series.prefix(row_end + static_cast<std::size_t>(v.lag)), v.stl);
    });
}

std::vector<std::vector<double>> training_histories(const PipelineVariant& v, const TimeSeries& series,
                                                    const std::optional<DecomposedSeries>& d) {
    if (v.mode == PipelineMode::Nondecomposed) {
        return {std::vector<double>(series.values().begin(), series.values().end())};
    }
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < modelled_components(v); ++i) {
        out.push_back(component_values(*d, kComponents[i]));
    }
    return out;
}

const LearnerSpec& spec_for(const PipelineVariant& v, std::size_t i) {
    return v.mode == PipelineMode::Nondecomposed ? v.single : v.components[i];
}

std::string model_name(const PipelineVariant& v, std::size_t i) {
    return v.mode == PipelineMode::Nondecomposed ? std::string("series") : std::string(component_name(kComponents[i]));
}

// Forecasts of targets [begin, end) for one component model.
std::vector<double> component_forecasts(const ComponentModel& model, HistoryProvider& histories, std::size_t index,
                                        int horizon, std::size_t begin, std::size_t end) {
    std::vector<double> out;
    out.reserve(end - begin);
    const OneStepPredictor predictor = [&model](std::span<const double> lags) { return model.predict_lags(lags); };
    for (std::size_t t = begin; t < end; ++t) {
        const auto& hist = histories.at_origin(t - static_cast<std::size_t>(horizon));
        out.push_back(recursive_forecast(predictor, hist[index], model.lag(), horizon, t));
    }
    return out;
}

void check_forecast_range(const PipelineVariant& v, const TimeSeries& observations, int horizon, std::size_t begin,
                          std::size_t end) {
    require(horizon == 1 || horizon == 2, ErrorCode::InvalidArgument, "forecast: horizon must be 1 or 2");
    require(begin <= end, ErrorCode::InvalidArgument, "forecast: empty or reversed range");
    require(begin >= static_cast<std::size_t>(v.lag + horizon - 1), ErrorCode::InsufficientData,
            "forecast: range starts before the available lag history");
    require(end <= observations.size() + static_cast<std::size_t>(horizon), ErrorCode::InvalidArgument,
            "forecast: range extends beyond the available history");
}

struct Segment {
    const TimeSeries* fit_series;
    std::size_t row_begin;
    std::size_t row_end;
    std::size_t target_begin;
    std::size_t target_end;
};

struct Protocol {
    std::optional<TimeSeries> prefix;
    std::vector<Segment> segments;
};

Protocol scoring_protocol(const TimeSeries& series, int lag, const GridSearchConfig& config) {
    require(config.horizon == 1 || config.horizon == 2, ErrorCode::InvalidArgument, "grid search: horizon must be 1 or 2");
    require(series.size() > static_cast<std::size_t>(lag), ErrorCode::InsufficientData, "grid search: series shorter than lag");
    const std::size_t rows = series.size() - static_cast<std::size_t>(lag);
    const std::size_t n_train = train_rows_for(rows, config.split_ratio);
    const auto ulag = static_cast<std::size_t>(lag);
    Protocol p;
    if (config.selection == Selection::Test) {
        require(n_train < rows, ErrorCode::InsufficientData, "grid search: test selection needs a nonempty test set");
        p.segments.push_back(Segment{&series, 0, n_train, ulag + n_train, series.size()});
        return p;
    }
    // Validation never reads beyond the observations behind the training rows.
    p.prefix = series.prefix(ulag + n_train);
    const auto slices = time_slices(n_train, TimeSliceConfig{config.initial_window,
                                                             static_cast<std::size_t>(config.horizon),
                                                             config.growing_window});
    for (const auto& s : slices) {
        p.segments.push_back(Segment{&*p.prefix, s.train.front(), s.train.back() + 1, ulag + s.validation.front(),
                                     ulag + s.validation.back() + 1});
    }
    return p;
}

unsigned worker_count(unsigned requested, std::size_t tasks) {
    unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(tasks, 1)));
}

std::string stl_label(LearnerKind k) {
    switch (k) {
    case LearnerKind::Knn: return "STL-KNN";
    case LearnerKind::Mars: return "STL-MARS";
    case LearnerKind::Svr: return "STL-SVR";
    case LearnerKind::GlmBoost: return "STL-GLMBoost";
    case LearnerKind::Cubist: return "STL-CUBIST";
    case LearnerKind::Mlp: return "STL-MLP";
    }
    return "STL-?";
}

} // namespace

std::string_view component_name(Component c) {
    switch (c) {
    case Component::Seasonal: return "seasonal";
    case Component::Trend: return "trend";
    case Component::Remainder: return "remainder";
    }
    return "?";
}

const LearnerSpec& EnsembleAssignment::operator[](Component c) const {
    switch (c) {
    case Component::Seasonal: return seasonal;
    case Component::Trend: return trend;
    case Component::Remainder: return remainder;
    }
    return remainder;
}

std::string EnsembleAssignment::label() const {
    return std::string(kind_name(seasonal.kind())) + "/" + std::string(kind_name(trend.kind())) + "/" +
           std::string(kind_name(remainder.kind()));
}

PipelineVariant PipelineVariant::decomposed(std::string name, const EnsembleAssignment& a) {
    PipelineVariant v;
    v.name = std::move(name);
    v.mode = PipelineMode::Decomposed;
    v.components = {a.seasonal, a.trend, a.remainder};
    return v;
}

PipelineVariant PipelineVariant::nondecomposed(std::string name, LearnerSpec spec) {
    PipelineVariant v;
    v.name = std::move(name);
    v.mode = PipelineMode::Nondecomposed;
    v.single = std::move(spec);
    return v;
}

PipelineVariant preset_variant(std::string_view name) {
    std::string n(name);
    for (auto& c : n) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    auto homogeneous = [](LearnerKind k) {
        return EnsembleAssignment{role_preset(k, Role::Seasonal), role_preset(k, Role::Trend),
                                  role_preset(k, Role::Remainder), 1};
    };
    if (n == "stl-ensemble-1") {
        return PipelineVariant::decomposed(preset_label(n), EnsembleAssignment{role_preset(LearnerKind::Svr, Role::Seasonal),
                                                                              role_preset(LearnerKind::Mars, Role::Trend),
                                                                              role_preset(LearnerKind::GlmBoost, Role::Remainder), 1});
    }
    if (n == "stl-ensemble-2") {
        return PipelineVariant::decomposed(preset_label(n), EnsembleAssignment{role_preset(LearnerKind::Cubist, Role::Seasonal),
                                                                              role_preset(LearnerKind::Knn, Role::Trend),
                                                                              role_preset(LearnerKind::Mlp, Role::Remainder), 2});
    }
    if (n.rfind("stl-", 0) == 0) {
        const LearnerKind k = parse_kind(n.substr(4));
        return PipelineVariant::decomposed(preset_label(n), homogeneous(k));
    }
    const LearnerKind k = parse_kind(n);
    return PipelineVariant::nondecomposed(preset_label(n), role_preset(k, Role::Nondecomposed));
}

std::string preset_label(std::string_view name) {
    std::string n(name);
    for (auto& c : n) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (n == "stl-ensemble-1") return "STL-Ensemble-1";
    if (n == "stl-ensemble-2") return "STL-Ensemble-2";
    if (n.rfind("stl-", 0) == 0) return stl_label(parse_kind(n.substr(4)));
    return std::string(kind_label(parse_kind(n)));
}

ComponentModel ComponentModel::fit(std::span<const double> history, int lag, std::size_t row_begin, std::size_t row_end,
                                   const LearnerSpec& spec, double pca_threshold) {
    const SupervisedDataset all = lag_embed(history, lag);
    require(row_begin < row_end && row_end <= all.rows(), ErrorCode::InvalidArgument, "component fit: row range out of bounds");
    require(row_end - row_begin >= 2, ErrorCode::InsufficientData,
            "only " + std::to_string(row_end - row_begin) + " training rows");
    const SupervisedDataset train = all.slice(row_begin, row_end);

    ComponentModel m;
    m.lag_ = lag;
    m.train_rows_ = train.rows();
    m.standardizer_ = Standardizer::fit(train.features);
    const Matrix z = m.standardizer_.apply(train.features);
    m.pca_ = PcaModel::fit(z, pca_threshold);
    const Matrix scores = m.pca_.transform(z);
    m.model_ = std::make_shared<const FittedModel>(stlens::fit(spec, scores, train.targets));
    return m;
}

double ComponentModel::predict_lags(std::span<const double> lags) const {
    require(lags.size() == static_cast<std::size_t>(lag_), ErrorCode::DimensionMismatch, "component model: wrong number of lags");
    Vector row(lag_);
    for (int j = 0; j < lag_; ++j) row(j) = lags[static_cast<std::size_t>(j)];
    return model_->predict_row(pca_.transform_row(standardizer_.apply_row(row)));
}

double recursive_forecast(const OneStepPredictor& predictor, std::span<const double> history, int lag, int horizon,
                          std::size_t t) {
    require(horizon == 1 || horizon == 2, ErrorCode::InvalidArgument, "recursive forecast: horizon must be 1 or 2");
    require(lag >= 1, ErrorCode::InvalidArgument, "recursive forecast: lag must be at least 1");
    const auto ulag = static_cast<std::size_t>(lag);
    const auto h = static_cast<std::size_t>(horizon);
    require(t >= ulag + h - 1, ErrorCode::InsufficientData, "recursive forecast: not enough lag history");
    require(t - h < history.size(), ErrorCode::InvalidArgument, "recursive forecast: origin beyond history");

    std::vector<double> lags(ulag);
    if (horizon == 1) {
        for (std::size_t j = 0; j < ulag; ++j) lags[j] = history[t - 1 - j];
        return predictor(lags);
    }
    for (std::size_t j = 0; j < ulag; ++j) lags[j] = history[t - 2 - j];
    const double previous = predictor(lags);
    lags[0] = previous;
    for (std::size_t j = 1; j < ulag; ++j) lags[j] = history[t - 1 - j];
    return predictor(lags);
}

FittedPipeline fit_pipeline_rows(const PipelineVariant& variant, const TimeSeries& series, std::size_t row_begin,
                                 std::size_t row_end) {
    validate_variant(variant);
    require(series.size() > static_cast<std::size_t>(variant.lag), ErrorCode::InsufficientData,
            "fit: series of length " + std::to_string(series.size()) + " is too short for lag " + std::to_string(variant.lag));
    const std::size_t rows = series.size() - static_cast<std::size_t>(variant.lag);
    require(row_begin < row_end && row_end <= rows, ErrorCode::InvalidArgument, "fit: training rows out of range");
    require(row_end - row_begin >= 2, ErrorCode::InsufficientData,
            "fit: " + std::to_string(row_end - row_begin) + " training rows, at least 2 required");

    FittedPipeline p;
    p.variant_ = variant;
    p.series_ = series;
    p.row_begin_ = row_begin;
    p.row_end_ = row_end;
    p.decomposition_ = training_decomposition(variant, series, row_end);
    const auto histories = training_histories(variant, series, p.decomposition_);
    for (std::size_t i = 0; i < histories.size(); ++i) {
        const LearnerSpec& spec = spec_for(variant, i);
        const std::string name = model_name(variant, i);
        p.models_.push_back(with_stage("fit[" + name + ":" + std::string(kind_name(spec.kind())) + "]", [&] {
            return ComponentModel::fit(histories[i], variant.lag, row_begin, row_end, spec, variant.pca_threshold);
        }));
        p.names_.push_back(name);
    }
    return p;
}

FittedPipeline fit_pipeline(const PipelineVariant& variant, const TimeSeries& series, double split_ratio) {
    require(series.size() > static_cast<std::size_t>(variant.lag), ErrorCode::InsufficientData,
            "fit: series of length " + std::to_string(series.size()) + " is too short for lag " + std::to_string(variant.lag));
    const std::size_t rows = series.size() - static_cast<std::size_t>(variant.lag);
    const std::size_t n_train = train_rows_for(rows, split_ratio);
    require(n_train >= 2, ErrorCode::InsufficientData,
            "fit: " + std::to_string(n_train) + " training rows after the split, at least 2 required");
    return fit_pipeline_rows(variant, series, 0, n_train);
}

HistoryProvider::HistoryProvider(const PipelineVariant& variant, const TimeSeries& observations,
                                 const std::optional<DecomposedSeries>& fitted_decomposition)
    : variant_(variant), observations_(observations) {
    if (variant.mode == PipelineMode::Nondecomposed) {
        fixed_.push_back(std::vector<double>(observations.values().begin(), observations.values().end()));
    } else if (variant.decomposition == DecompositionMode::Full) {
        const DecomposedSeries d = fitted_decomposition ? *fitted_decomposition
                                                        : with_stage("decompose", [&] { return stl_decompose(observations, variant.stl); });
        for (std::size_t i = 0; i < modelled_components(variant); ++i) {
            fixed_.push_back(component_values(d, kComponents[i]));
        }
    }
}

const std::vector<std::vector<double>>& HistoryProvider::at_origin(std::size_t origin) {
    require(origin < observations_.size(), ErrorCode::InvalidArgument, "forecast origin beyond the observations");
    if (!fixed_.empty()) {
        return fixed_;
    }
    if (origin != causal_origin_) {
        const DecomposedSeries d = with_stage("decompose[origin " + std::to_string(origin) + "]", [&] {
            return stl_decompose(observations_.prefix(origin + 1), variant_.stl);
        });
        causal_.clear();
        for (std::size_t i = 0; i < modelled_components(variant_); ++i) {
            causal_.push_back(component_values(d, kComponents[i]));
        }
        causal_origin_ = origin;
    }
    return causal_;
}

ForecastResult forecast_recursive(const FittedPipeline& pipeline, int horizon, std::size_t begin, std::size_t end,
                                  const TimeSeries* observations) {
    const PipelineVariant& v = pipeline.variant();
    const TimeSeries& obs = observations ? *observations : pipeline.series();
    require(obs.start() == pipeline.series().start() && obs.period() == pipeline.series().period(),
            ErrorCode::InvalidArgument, "forecast: observations are on a different calendar grid");
    check_forecast_range(v, obs, horizon, begin, end);

    // The fitted decomposition covers every observation only in full mode.
    std::optional<DecomposedSeries> reuse;
    if (observations == nullptr && v.decomposition == DecompositionMode::Full) {
        reuse = pipeline.decomposition();
    }
    HistoryProvider histories(v, obs, reuse);

    ForecastResult r;
    r.horizon = horizon;
    r.component_names = pipeline.model_names();
    for (std::size_t i = 0; i < pipeline.models().size(); ++i) {
        r.components.push_back(with_stage("forecast[" + pipeline.model_names()[i] + "]", [&] {
            return component_forecasts(pipeline.models()[i], histories, i, horizon, begin, end);
        }));
    }
    for (std::size_t t = begin; t < end; ++t) {
        r.timestamps.push_back(t);
        r.months.push_back(obs.month_at(t));
        double total = 0.0;
        for (const auto& c : r.components) total += c[t - begin];
        r.recomposed.push_back(total);
        r.observed.push_back(t < obs.size() ? obs[t] : std::numeric_limits<double>::quiet_NaN());
    }
    return r;
}

ForecastResult forecast_test(const FittedPipeline& pipeline, int horizon) {
    const std::size_t begin = pipeline.first_test_index();
    require(begin < pipeline.series().size(), ErrorCode::InsufficientData, "forecast: the test set is empty");
    return forecast_recursive(pipeline, horizon, begin, pipeline.series().size());
}

std::size_t first_forecastable_index(const PipelineVariant& variant, int horizon) {
    std::size_t first = static_cast<std::size_t>(variant.lag + horizon - 1);
    if (variant.mode == PipelineMode::Decomposed && variant.decomposition == DecompositionMode::Causal) {
        // Each origin is decomposed on its own; STL needs two full cycles.
        first = std::max(first, static_cast<std::size_t>(2 * variant.stl.period - 1 + horizon));
    }
    return first;
}

GridCandidates GridCandidates::from_kinds(std::span<const LearnerKind> seasonal, std::span<const LearnerKind> trend,
                                          std::span<const LearnerKind> remainder) {
    GridCandidates g;
    const std::array<std::span<const LearnerKind>, 3> lists{seasonal, trend, remainder};
    for (std::size_t c = 0; c < 3; ++c) {
        for (auto k : lists[c]) {
            g.per_component[c].push_back(role_preset(k, role_of(kComponents[c])));
        }
    }
    return g;
}

GridCandidates GridCandidates::all_kinds() {
    return from_kinds(kAllLearnerKinds, kAllLearnerKinds, kAllLearnerKinds);
}

std::vector<GridResult> grid_search(const GridCandidates& candidates, const TimeSeries& series,
                                    const PipelineVariant& base, const GridSearchConfig& config) {
    for (const auto& list : candidates.per_component) {
        require(!list.empty(), ErrorCode::InvalidArgument, "grid search: every component needs at least one candidate");
    }
    PipelineVariant proto = base;
    proto.mode = PipelineMode::Decomposed;
    require(proto.lag >= 1 && proto.pca_threshold > 0.0 && proto.pca_threshold <= 1.0, ErrorCode::InvalidArgument,
            "grid search: invalid lag or PCA threshold");
    const Protocol protocol = scoring_protocol(series, proto.lag, config);
    const std::size_t n_components = modelled_components(proto);

    // Shared per-segment inputs.
    std::vector<std::vector<std::vector<double>>> seg_histories;
    std::vector<std::optional<DecomposedSeries>> seg_decomp;
    std::vector<double> observed;
    for (const auto& seg : protocol.segments) {
        seg_decomp.push_back(training_decomposition(proto, *seg.fit_series, seg.row_end));
        seg_histories.push_back(training_histories(proto, *seg.fit_series, seg_decomp.back()));
        for (std::size_t t = seg.target_begin; t < seg.target_end; ++t) observed.push_back((*seg.fit_series)[t]);
    }

    // Forecasts of each (component, candidate) pair over all segments.
    struct Task {
        std::size_t component;
        std::size_t candidate;
        std::vector<double> forecasts;
        std::optional<std::string> error;
    };
    std::vector<Task> tasks;
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t k = 0; k < candidates.per_component[c].size(); ++k) {
            tasks.push_back(Task{c, k, {}, std::nullopt});
        }
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            Task& task = tasks[i];
            if (task.component >= n_components) continue;
            const LearnerSpec& spec = candidates.per_component[task.component][task.candidate];
            try {
                for (std::size_t s = 0; s < protocol.segments.size(); ++s) {
                    const Segment& seg = protocol.segments[s];
                    const ComponentModel model = ComponentModel::fit(seg_histories[s][task.component], proto.lag, seg.row_begin,
                                                                     seg.row_end, spec, proto.pca_threshold);
                    const auto reuse = proto.decomposition == DecompositionMode::Full ? seg_decomp[s] : std::nullopt;
                    HistoryProvider histories(proto, *seg.fit_series, reuse);
                    auto f = component_forecasts(model, histories, task.component, config.horizon, seg.target_begin,
                                                 seg.target_end);
                    task.forecasts.insert(task.forecasts.end(), f.begin(), f.end());
                }
            } catch (const std::exception& e) {
                task.error = std::string(component_name(kComponents[task.component])) + ":" +
                             std::string(kind_name(spec.kind())) + ": " + e.what();
            }
        }
    };
    const unsigned n_workers = worker_count(config.jobs, tasks.size());
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    auto task_of = [&](std::size_t c, std::size_t k) -> const Task& {
        std::size_t offset = 0;
        for (std::size_t i = 0; i < c; ++i) offset += candidates.per_component[i].size();
        return tasks[offset + k];
    };

    std::vector<GridResult> results;
    const auto& cs = candidates.per_component;
    for (std::size_t i = 0; i < cs[0].size(); ++i) {
        for (std::size_t j = 0; j < cs[1].size(); ++j) {
            for (std::size_t k = 0; k < cs[2].size(); ++k) {
                GridResult r;
                r.assignment = EnsembleAssignment{cs[0][i], cs[1][j], cs[2][k], config.horizon};
                r.indices = {i, j, k};
                const std::array<std::size_t, 3> idx{i, j, k};
                for (std::size_t c = 0; c < n_components && !r.error; ++c) {
                    if (task_of(c, idx[c]).error) r.error = task_of(c, idx[c]).error;
                }
                if (r.error) {
                    r.score = std::numeric_limits<double>::infinity();
                } else {
                    std::vector<double> total(observed.size());
                    for (std::size_t t = 0; t < observed.size(); ++t) {
                        double sum = 0.0;
                        for (std::size_t c = 0; c < n_components; ++c) sum += task_of(c, idx[c]).forecasts[t];
                        total[t] = sum;
                    }
                    try {
                        r.score = rrmse(observed, total);
                    } catch (const Error& e) {
                        r.error = e.what();
                        r.score = std::numeric_limits<double>::infinity();
                    }
                }
                results.push_back(std::move(r));
            }
        }
    }
    std::stable_sort(results.begin(), results.end(), [](const GridResult& a, const GridResult& b) {
        if (a.score != b.score) return a.score < b.score;
        const std::array<int, 3> ka{static_cast<int>(a.assignment.seasonal.kind()), static_cast<int>(a.assignment.trend.kind()),
                                    static_cast<int>(a.assignment.remainder.kind())};
        const std::array<int, 3> kb{static_cast<int>(b.assignment.seasonal.kind()), static_cast<int>(b.assignment.trend.kind()),
                                    static_cast<int>(b.assignment.remainder.kind())};
        if (ka != kb) return ka < kb;
        return a.indices < b.indices;
    });
    return results;
}

double evaluate_variant(const PipelineVariant& variant, const TimeSeries& series, const GridSearchConfig& config) {
    const Protocol protocol = scoring_protocol(series, variant.lag, config);
    std::vector<double> observed;
    std::vector<double> predicted;
    for (const auto& seg : protocol.segments) {
        const FittedPipeline p = fit_pipeline_rows(variant, *seg.fit_series, seg.row_begin, seg.row_end);
        const ForecastResult f = forecast_recursive(p, config.horizon, seg.target_begin, seg.target_end);
        observed.insert(observed.end(), f.observed.begin(), f.observed.end());
        predicted.insert(predicted.end(), f.recomposed.begin(), f.recomposed.end());
    }
    return rrmse(observed, predicted);
}

std::vector<std::string> comparison_presets(int horizon) {
    require(horizon == 1 || horizon == 2, ErrorCode::InvalidArgument, "comparison: horizon must be 1 or 2");
    if (horizon == 1) {
        return {"stl-ensemble-1", "stl-mars", "stl-svr", "stl-glmboost", "mars", "svr", "glmboost"};
    }
    return {"stl-ensemble-2", "stl-knn", "stl-cubist", "stl-mlp", "knn", "cubist", "mlp"};
}

Comparison run_comparison(const TimeSeries& series, int horizon, const ComparisonOptions& options) {
    Comparison out;
    std::vector<ModelForecast> forecasts;
    for (const auto& preset : comparison_presets(horizon)) {
        PipelineVariant v = preset_variant(preset);
        v.lag = options.lag;
        v.pca_threshold = options.pca_threshold;
        v.stl = options.stl;
        v.decomposition = options.decomposition;
        v.drop_remainder = options.drop_remainder;
        ComparisonEntry entry;
        entry.label = v.name;
        with_stage(v.name, [&] {
            const FittedPipeline p = fit_pipeline(v, series, options.split_ratio);
            entry.forecast = forecast_test(p, horizon);
            for (const auto& m : p.models()) entry.pca_components.push_back(m.pca().kept());
        });
        forecasts.push_back(ModelForecast{entry.label, entry.forecast.observed, entry.forecast.recomposed});
        out.entries.push_back(std::move(entry));
    }
    out.report = build_report(forecasts, out.entries.front().label, horizon, options.dm);
    return out;
}

} // namespace stlens
