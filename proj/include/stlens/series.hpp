#pragma once

#include "stlens/types.hpp"

#include <compare>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace stlens {

/// Calendar month. Arithmetic is in whole months.
struct YearMonth {
    int year = 1970;
    int month = 1; // 1..12

    /// Parses `YYYY-MM`; throws Error(Parse) on malformed text.
    static YearMonth parse(std::string_view text);

    std::string to_string() const;
    YearMonth plus_months(long months) const;
    /// Signed number of months from `other` to `*this`.
    long months_since(const YearMonth& other) const;

    auto operator<=>(const YearMonth&) const = default;
};

/// Regular monthly-indexed series. Observation i sits at start + i months.
class TimeSeries {
public:
    TimeSeries(YearMonth start, int period, std::vector<double> values);

    const YearMonth& start() const noexcept { return start_; }
    int period() const noexcept { return period_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    YearMonth month_at(std::size_t i) const { return start_.plus_months(static_cast<long>(i)); }

    /// Same calendar grid, different values (length must match).
    TimeSeries with_values(std::vector<double> values) const;
    /// First `n` observations.
    TimeSeries prefix(std::size_t n) const;

private:
    YearMonth start_;
    int period_;
    std::vector<double> values_;
};

struct SummaryStats {
    std::size_t count = 0;
    double max = 0.0;
    double min = 0.0;
    double mean = 0.0;
    double median = 0.0;
    double std = 0.0; // sample standard deviation (n - 1)
};

SummaryStats summary_stats(std::span<const double> values);
inline SummaryStats summary_stats(const TimeSeries& series) { return summary_stats(series.values()); }

/// Lag-embedded rows: features(i, j) = y(t_i - 1 - j), target(i) = y(t_i).
struct SupervisedDataset {
    Matrix features;
    Vector targets;
    int lag = 1;
    std::vector<std::size_t> timestamps; // series index of each target

    std::size_t rows() const noexcept { return static_cast<std::size_t>(targets.size()); }
    /// Contiguous block of rows [begin, end).
    SupervisedDataset slice(std::size_t begin, std::size_t end) const;
    SupervisedDataset select(std::span<const std::size_t> rows) const;
};

SupervisedDataset lag_embed(std::span<const double> values, int lag);
inline SupervisedDataset lag_embed(const TimeSeries& series, int lag) { return lag_embed(series.values(), lag); }

struct ChronoSplit {
    SupervisedDataset train;
    SupervisedDataset test;
    double ratio = 1.0;
};

/// Rows of the training part for a given ratio: floor(ratio * rows).
std::size_t train_rows_for(std::size_t rows, double ratio);
ChronoSplit chrono_split(const SupervisedDataset& data, double ratio);

struct SyntheticSpec {
    int n = 255;
    int period = 12;
    double trend_slope = 0.0;
    double seasonal_amplitude = 1.0;
    double noise_std = 0.0;
    std::uint64_t seed = 1;
    YearMonth start{2000, 1};
};

/// y(t) = slope * t + amplitude * sin(2 pi t / period) + N(0, noise_std).
TimeSeries gen_synthetic(const SyntheticSpec& spec);

struct CsvSchema {
    std::string date_column = "date";
    std::string value_column = "fire_spots";
};

TimeSeries load_csv(const std::filesystem::path& path, const CsvSchema& schema = {}, int period = 12);
void write_csv(const TimeSeries& series, const std::filesystem::path& path, const CsvSchema& schema = {});

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

} // namespace stlens
