#pragma once

#include "stlens/evaluation.hpp"
#include "stlens/learner.hpp"
#include "stlens/preprocess.hpp"
#include "stlens/series.hpp"
#include "stlens/stl.hpp"

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stlens {

enum class Component { Seasonal = 0, Trend = 1, Remainder = 2 };
std::string_view component_name(Component c);

/// How component histories are produced.
enum class DecompositionMode {
    /// One decomposition of every observation handed to the pipeline.
    Full,
    /// Training components come from the training prefix only; the history
    /// for a forecast origin o comes from decomposing y[0..o].
    Causal,
};

enum class PipelineMode { Decomposed, Nondecomposed };

struct EnsembleAssignment {
    LearnerSpec seasonal;
    LearnerSpec trend;
    LearnerSpec remainder;
    int horizon = 1;

    const LearnerSpec& operator[](Component c) const;
    /// e.g. "svr/mars/glmboost".
    std::string label() const;
};

struct PipelineVariant {
    std::string name;
    PipelineMode mode = PipelineMode::Decomposed;
    std::array<LearnerSpec, 3> components{default_spec(LearnerKind::Knn), default_spec(LearnerKind::Knn),
                                          default_spec(LearnerKind::Knn)};
    LearnerSpec single = default_spec(LearnerKind::Knn);
    int lag = 10;
    double pca_threshold = 0.95;
    StlConfig stl;
    DecompositionMode decomposition = DecompositionMode::Full;
    bool drop_remainder = false;

    static PipelineVariant decomposed(std::string name, const EnsembleAssignment& assignment);
    static PipelineVariant nondecomposed(std::string name, LearnerSpec spec);
};

/// Preset pipelines: stl-ensemble-1, stl-ensemble-2, stl-<kind> (homogeneous
/// decomposed, per-component presets) and <kind> (nondecomposed preset).
PipelineVariant preset_variant(std::string_view name);
/// Report label of a preset, e.g. "STL-Ensemble-1", "STL-MARS", "k-NN".
std::string preset_label(std::string_view name);

/// Standardize -> PCA -> learner chain on lag vectors of one series.
class ComponentModel {
public:
    static ComponentModel fit(std::span<const double> history, int lag, std::size_t row_begin, std::size_t row_end,
                              const LearnerSpec& spec, double pca_threshold);

    /// Prediction from a lag vector ordered most recent first.
    double predict_lags(std::span<const double> lags) const;

    const Standardizer& standardizer() const noexcept { return standardizer_; }
    const PcaModel& pca() const noexcept { return pca_; }
    const FittedModel& model() const noexcept { return *model_; }
    int lag() const noexcept { return lag_; }
    std::size_t train_rows() const noexcept { return train_rows_; }

private:
    Standardizer standardizer_;
    PcaModel pca_;
    std::shared_ptr<const FittedModel> model_;
    int lag_ = 1;
    std::size_t train_rows_ = 0;
};

using OneStepPredictor = std::function<double(std::span<const double>)>;

/// Recursive h-step forecast of history[t] (h = 1 or 2) made at origin t - h.
/// h = 1 reads history[t-1..t-lag]; h = 2 first predicts t-1 from
/// history[t-2..t-1-lag], then substitutes it into the lag-1 slot while the
/// remaining lags stay observed values. history[t-h+1..] is never read.
double recursive_forecast(const OneStepPredictor& predictor, std::span<const double> history, int lag, int horizon,
                          std::size_t t);

struct ForecastResult {
    int horizon = 1;
    std::vector<std::size_t> timestamps; // series index of each target
    std::vector<YearMonth> months;
    std::vector<double> recomposed;
    std::vector<std::string> component_names;
    std::vector<std::vector<double>> components; // one forecast vector per component
    std::vector<double> observed;                // NaN past the end of the data
};

class FittedPipeline {
public:
    const PipelineVariant& variant() const noexcept { return variant_; }
    const TimeSeries& series() const noexcept { return series_; }
    std::size_t train_rows() const noexcept { return row_end_; }
    std::size_t first_train_row() const noexcept { return row_begin_; }
    /// Series index of the first target after the training rows.
    std::size_t first_test_index() const noexcept { return row_end_ + static_cast<std::size_t>(variant_.lag); }
    const std::vector<ComponentModel>& models() const noexcept { return models_; }
    const std::vector<std::string>& model_names() const noexcept { return names_; }
    /// Decomposition the training rows were drawn from (decomposed mode).
    const std::optional<DecomposedSeries>& decomposition() const noexcept { return decomposition_; }

private:
    friend FittedPipeline fit_pipeline_rows(const PipelineVariant&, const TimeSeries&, std::size_t, std::size_t);
    PipelineVariant variant_;
    TimeSeries series_{YearMonth{}, 2, {0.0}};
    std::size_t row_begin_ = 0;
    std::size_t row_end_ = 0;
    std::vector<ComponentModel> models_;
    std::vector<std::string> names_;
    std::optional<DecomposedSeries> decomposition_;
};

/// Fits on lag-embedded rows [row_begin, row_end) of `series`.
FittedPipeline fit_pipeline_rows(const PipelineVariant& variant, const TimeSeries& series, std::size_t row_begin,
                                 std::size_t row_end);
/// Fits on the first floor(split_ratio * rows) lag-embedded rows.
FittedPipeline fit_pipeline(const PipelineVariant& variant, const TimeSeries& series, double split_ratio);

/// Component histories visible at each forecast origin.
class HistoryProvider {
public:
    HistoryProvider(const PipelineVariant& variant, const TimeSeries& observations,
                    const std::optional<DecomposedSeries>& fitted_decomposition);

    /// Histories (one per modelled component) containing at least indices 0..origin.
    const std::vector<std::vector<double>>& at_origin(std::size_t origin);

private:
    const PipelineVariant& variant_;
    const TimeSeries& observations_;
    std::vector<std::vector<double>> fixed_;
    std::vector<std::vector<double>> causal_;
    std::size_t causal_origin_ = static_cast<std::size_t>(-1);
};

/// Forecasts of targets t in [begin, end). `observations` defaults to the
/// fitted series; passing another series with the same calendar grid
/// forecasts from those values without refitting.
ForecastResult forecast_recursive(const FittedPipeline& pipeline, int horizon, std::size_t begin, std::size_t end,
                                  const TimeSeries* observations = nullptr);
/// Forecasts over the test rows of the fitted series.
ForecastResult forecast_test(const FittedPipeline& pipeline, int horizon);
/// Earliest target index with enough history for the variant at a horizon.
std::size_t first_forecastable_index(const PipelineVariant& variant, int horizon);

enum class Selection { Validation, Test };

struct GridSearchConfig {
    int horizon = 1;
    Selection selection = Selection::Validation;
    double split_ratio = 0.70;
    /// Initial window of the time slices, in training rows.
    std::size_t initial_window = 120;
    bool growing_window = true;
    unsigned jobs = 0; // 0 = hardware concurrency
};

struct GridCandidates {
    std::array<std::vector<LearnerSpec>, 3> per_component;

    /// The component-specific presets of every listed kind.
    static GridCandidates from_kinds(std::span<const LearnerKind> seasonal, std::span<const LearnerKind> trend,
                                     std::span<const LearnerKind> remainder);
    static GridCandidates all_kinds();
};

struct GridResult {
    EnsembleAssignment assignment;
    std::array<std::size_t, 3> indices{};
    double score = 0.0; // RRMSE; +inf when the candidate failed
    std::optional<std::string> error;
};

/// Scores every assignment of the candidate cross-product by RRMSE of the
/// recomposed forecast, ranked ascending with ties broken by (seasonal,
/// trend, remainder) kind order and then candidate order. `base` supplies
/// lag, PCA threshold, STL settings and decomposition mode. In validation
/// mode only the training prefix of `series` is read.
std::vector<GridResult> grid_search(const GridCandidates& candidates, const TimeSeries& series,
                                    const PipelineVariant& base, const GridSearchConfig& config);

/// Score of one variant under the same protocol as grid_search.
double evaluate_variant(const PipelineVariant& variant, const TimeSeries& series, const GridSearchConfig& config);

struct ComparisonOptions {
    double split_ratio = 0.70;
    int lag = 10;
    double pca_threshold = 0.95;
    StlConfig stl;
    DecompositionMode decomposition = DecompositionMode::Full;
    bool drop_remainder = false;
    DmOptions dm;
};

struct ComparisonEntry {
    std::string label;
    ForecastResult forecast;
    std::vector<std::size_t> pca_components; // kept components per modelled component
};

struct Comparison {
    EvaluationReport report;
    std::vector<ComparisonEntry> entries;
};

/// The preset names compared at a horizon, heterogeneous ensemble first.
std::vector<std::string> comparison_presets(int horizon);

/// Fits and test-evaluates the ensemble, its homogeneous STL counterparts and
/// the nondecomposed learners for the horizon; DM baseline is the ensemble.
Comparison run_comparison(const TimeSeries& series, int horizon, const ComparisonOptions& options = {});

} // namespace stlens
