#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace stlens {

/// sqrt(mean squared error) / mean(observed).
double rrmse(std::span<const double> observed, std::span<const double> predicted);
/// 1 - RSS / TSS, TSS about the mean of `observed`.
double r_squared(std::span<const double> observed, std::span<const double> predicted);

struct MetricPair {
    double rrmse = 0.0;
    double r_squared = 0.0;
};

MetricPair evaluate_metrics(std::span<const double> observed, std::span<const double> predicted);

struct DmOptions {
    int horizon = 1;
    /// Harvey-Leybourne-Newbold small-sample correction with Student-t reference.
    bool small_sample_correction = false;
};

struct DmResult {
    double statistic = 0.0; // negative: the first forecast has smaller losses
    double p_value = 1.0;   // two-sided
    int horizon = 1;
    std::size_t n = 0;
};

/// Diebold-Mariano test on squared-error losses of two forecast-error series.
DmResult dm_test(std::span<const double> errors_a, std::span<const double> errors_b, const DmOptions& options = {});

struct ModelForecast {
    std::string name;
    std::vector<double> observed;
    std::vector<double> predicted;
};

struct ReportRow {
    std::string model;
    int horizon = 1;
    MetricPair metrics;
    std::optional<DmResult> dm; // baseline vs this model; empty for the baseline
    std::optional<std::string> dm_error;
};

struct EvaluationReport {
    int horizon = 1;
    std::string baseline;
    std::vector<ReportRow> rows;

    const ReportRow& row(const std::string& model) const;
};

/// Metrics for every model and the DM test of the baseline against each other model.
EvaluationReport build_report(const std::vector<ModelForecast>& results, const std::string& baseline, int horizon,
                              const DmOptions& dm_options = {});

/// Published test-set reference values for a model row label, when one exists.
std::optional<MetricPair> reference_metrics(const std::string& model, int horizon);

/// CSV with columns model,horizon,rrmse,r2,dm_vs_baseline,p_value; with
/// `with_reference`, trailing columns reference_rrmse,reference_r2.
void write_report_csv(const EvaluationReport& report, std::ostream& out, bool with_reference = false);

/// Rounds to `digits` significant digits for display.
std::string format_significant(double value, int digits = 4);

} // namespace stlens
