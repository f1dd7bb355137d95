#include "stlens/evaluation.hpp"
#include "stlens/error.hpp"
#include "stlens/series.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <array>
#include <cmath>
#include <cstdio>

namespace stlens {

namespace {

void check_pair(std::span<const double> observed, std::span<const double> predicted, std::size_t min_len, const char* what) {
    require(observed.size() == predicted.size(), ErrorCode::DimensionMismatch,
            std::string(what) + ": observed and predicted lengths differ");
    require(observed.size() >= min_len, ErrorCode::InsufficientData, std::string(what) + ": too few observations");
}

double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

struct Reference {
    const char* model;
    int horizon;
    double rrmse;
    double r2;
};

constexpr std::array<Reference, 14> kReferences{{
    {"STL-Ensemble-1", 1, 0.3197, 0.9132},
    {"STL-MARS", 1, 0.3903, 0.8957},
    {"STL-SVR", 1, 0.3470, 0.9000},
    {"STL-GLMBoost", 1, 0.5961, 0.6818},
    {"MARS", 1, 0.6661, 0.5911},
    {"SVR", 1, 0.6540, 0.6742},
    {"GLMBoost", 1, 0.6395, 0.5542},
    {"STL-Ensemble-2", 2, 0.6311, 0.8186},
    {"STL-KNN", 2, 1.4046, 0.7236},
    {"STL-CUBIST", 2, 3.5327, 0.5425},
    {"STL-MLP", 2, 1.7753, 0.3504},
    {"k-NN", 2, 0.6641, 0.6490},
    {"CUBIST", 2, 0.7482, 0.5856},
    {"MLP", 2, 0.8575, 0.0581},
}};

} // namespace

double rrmse(std::span<const double> observed, std::span<const double> predicted) {
    check_pair(observed, predicted, 1, "rrmse");
    const double m = mean_of(observed);
    require(m != 0.0, ErrorCode::Degenerate, "rrmse: observed values have zero mean");
    double sse = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double e = observed[i] - predicted[i];
        sse += e * e;
    }
    return std::sqrt(sse / static_cast<double>(observed.size())) / m;
}

double r_squared(std::span<const double> observed, std::span<const double> predicted) {
    check_pair(observed, predicted, 2, "r_squared");
    const double m = mean_of(observed);
    double rss = 0.0;
    double tss = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        rss += (observed[i] - predicted[i]) * (observed[i] - predicted[i]);
        tss += (observed[i] - m) * (observed[i] - m);
    }
    require(tss > 0.0, ErrorCode::Degenerate, "r_squared: observed values are constant");
    return 1.0 - rss / tss;
}

MetricPair evaluate_metrics(std::span<const double> observed, std::span<const double> predicted) {
    return MetricPair{rrmse(observed, predicted), r_squared(observed, predicted)};
}

DmResult dm_test(std::span<const double> errors_a, std::span<const double> errors_b, const DmOptions& options) {
    require(errors_a.size() == errors_b.size(), ErrorCode::DimensionMismatch, "dm test: error series lengths differ");
    require(errors_a.size() >= 10, ErrorCode::InsufficientData, "dm test: needs at least 10 paired errors");
    require(options.horizon >= 1, ErrorCode::InvalidArgument, "dm test: horizon must be at least 1");

    const std::size_t n = errors_a.size();
    std::vector<double> d(n);
    for (std::size_t t = 0; t < n; ++t) {
        d[t] = errors_a[t] * errors_a[t] - errors_b[t] * errors_b[t];
    }
    const double dbar = mean_of(d);
    auto autocov = [&](std::size_t k) {
        double s = 0.0;
        for (std::size_t t = k; t < n; ++t) {
            s += (d[t] - dbar) * (d[t - k] - dbar);
        }
        return s / static_cast<double>(n);
    };
    double long_run = autocov(0);
    for (int k = 1; k < options.horizon && static_cast<std::size_t>(k) < n; ++k) {
        long_run += 2.0 * autocov(static_cast<std::size_t>(k));
    }
    double scale = 0.0;
    for (double v : d) scale += v * v;
    scale /= static_cast<double>(n);
    require(scale > 0.0 && long_run > 1e-12 * scale, ErrorCode::Degenerate,
            "dm test: loss differential has zero long-run variance");

    DmResult r;
    r.horizon = options.horizon;
    r.n = n;
    r.statistic = dbar / std::sqrt(long_run / static_cast<double>(n));
    if (options.small_sample_correction) {
        const auto nn = static_cast<double>(n);
        const double h = options.horizon;
        r.statistic *= std::sqrt((nn + 1.0 - 2.0 * h + h * (h - 1.0) / nn) / nn);
        boost::math::students_t dist(nn - 1.0);
        r.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.statistic)));
    } else {
        r.p_value = std::erfc(std::abs(r.statistic) / std::sqrt(2.0));
    }
    return r;
}

const ReportRow& EvaluationReport::row(const std::string& model) const {
    for (const auto& r : rows) {
        if (r.model == model) return r;
    }
    fail(ErrorCode::InvalidArgument, "report has no model '" + model + "'");
}

EvaluationReport build_report(const std::vector<ModelForecast>& results, const std::string& baseline, int horizon,
                              const DmOptions& dm_options) {
    require(!results.empty(), ErrorCode::InsufficientData, "report: no model results");
    const ModelForecast* base = nullptr;
    for (const auto& r : results) {
        if (r.name == baseline) base = &r;
    }
    require(base != nullptr, ErrorCode::InvalidArgument, "report: baseline '" + baseline + "' not among the results");
    for (const auto& r : results) {
        require(r.observed == base->observed, ErrorCode::DimensionMismatch,
                "report: model '" + r.name + "' is evaluated on a different test period");
    }

    EvaluationReport report;
    report.horizon = horizon;
    report.baseline = baseline;
    std::vector<double> base_errors(base->observed.size());
    for (std::size_t i = 0; i < base_errors.size(); ++i) {
        base_errors[i] = base->observed[i] - base->predicted[i];
    }
    DmOptions opts = dm_options;
    opts.horizon = horizon;
    for (const auto& r : results) {
        ReportRow row;
        row.model = r.name;
        row.horizon = horizon;
        row.metrics = evaluate_metrics(r.observed, r.predicted);
        if (r.name != baseline) {
            std::vector<double> errors(r.observed.size());
            for (std::size_t i = 0; i < errors.size(); ++i) {
                errors[i] = r.observed[i] - r.predicted[i];
            }
            try {
                row.dm = dm_test(base_errors, errors, opts);
            } catch (const Error& e) {
                row.dm_error = e.what();
            }
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::optional<MetricPair> reference_metrics(const std::string& model, int horizon) {
    for (const auto& ref : kReferences) {
        if (model == ref.model && horizon == ref.horizon) {
            return MetricPair{ref.rrmse, ref.r2};
        }
    }
    return std::nullopt;
}

void write_report_csv(const EvaluationReport& report, std::ostream& out, bool with_reference) {
    out << "model,horizon,rrmse,r2,dm_vs_baseline,p_value";
    if (with_reference) out << ",reference_rrmse,reference_r2";
    out << '\n';
    for (const auto& row : report.rows) {
        out << row.model << ',' << row.horizon << ',' << format_double(row.metrics.rrmse) << ','
            << format_double(row.metrics.r_squared) << ',';
        if (row.dm) {
            out << format_double(row.dm->statistic) << ',' << format_double(row.dm->p_value);
        } else {
            out << ',';
        }
        if (with_reference) {
            auto ref = reference_metrics(row.model, row.horizon);
            out << ',';
            if (ref) out << format_double(ref->rrmse) << ',' << format_double(ref->r_squared);
            else out << ',';
        }
        out << '\n';
    }
}

std::string format_significant(double value, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, value);
    return buf;
}

} // namespace stlens
