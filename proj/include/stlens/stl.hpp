#pragma once

#include "stlens/series.hpp"

#include <optional>
#include <span>
#include <vector>

namespace stlens {

struct LoessConfig {
    int span = 3;   // odd, >= 3
    int degree = 1; // 0 = local constant, 1 = local linear
    std::optional<std::vector<double>> weights; // robustness weights, one per point
};

/// Tricube kernel (1 - u^3)^3 for u = d / d_max in [0, 1), zero beyond.
double tricube(double distance, double max_distance);

/// Loess fit of (x, y) evaluated at `eval_points`, using the `span` nearest
/// observations of each evaluation point. x must be strictly increasing.
std::vector<double> loess_smooth(std::span<const double> x, std::span<const double> y,
                                 const LoessConfig& config, std::span<const double> eval_points);

struct StlConfig {
    /// Seasonal span value that selects periodic mode (subseries replaced by their mean).
    static constexpr int kPeriodic = 0;

    int period = 12;
    int seasonal_span = kPeriodic;
    int seasonal_degree = 0;
    int trend_span = 0;   // 0 = default from period and seasonal span
    int lowpass_span = 0; // 0 = smallest odd integer >= period
    int inner_iterations = 2;
    int outer_iterations = 1;

    bool periodic() const noexcept { return seasonal_span == kPeriodic; }
    /// Fills default spans and validates; throws Error(InvalidArgument).
    StlConfig resolved(std::size_t series_length) const;
};

int default_trend_span(int period, int seasonal_span);

struct DecomposedSeries {
    YearMonth start;
    int period = 12;
    std::vector<double> observed;
    std::vector<double> seasonal;
    std::vector<double> trend;
    std::vector<double> remainder;
    std::vector<double> robustness_weights;
    StlConfig config;

    std::size_t size() const noexcept { return observed.size(); }
};

DecomposedSeries stl_decompose(const TimeSeries& series, const StlConfig& config = {});

/// Pointwise sum seasonal + trend + remainder.
TimeSeries recompose(const DecomposedSeries& parts);

} // namespace stlens
