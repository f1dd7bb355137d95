#pragma once

#include "stlens/series.hpp"
#include "stlens/stl.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace stlens {

struct PlotLine {
    std::string label;
    std::string color = "#000000";
    bool dotted = false;
    /// Series index of values[0].
    std::size_t first_index = 0;
    std::vector<double> values;
};

/// Observed, seasonal, trend and remainder panels stacked vertically.
void write_decomposition_svg(const DecomposedSeries& parts, const std::filesystem::path& path);

/// Observed series with overlaid forecast lines; `split_index` marks the
/// first test month with a vertical rule.
void write_forecast_svg(const TimeSeries& observed, const std::vector<PlotLine>& forecasts,
                        std::optional<std::size_t> split_index, const std::filesystem::path& path);

} // namespace stlens
