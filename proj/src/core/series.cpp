#include "stlens/series.hpp"
#include "stlens/error.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace stlens {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r' || s.front() == '"')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t begin = 0;
    while (true) {
        auto pos = line.find(',', begin);
        if (pos == std::string_view::npos) {
            fields.push_back(trim(line.substr(begin)));
            break;
        }
        fields.push_back(trim(line.substr(begin, pos - begin)));
        begin = pos + 1;
    }
    return fields;
}

bool parse_int(std::string_view text, int& out) {
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

bool parse_real(std::string_view text, double& out) {
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size() && std::isfinite(out);
}

} // namespace

YearMonth YearMonth::parse(std::string_view text) {
    text = trim(text);
    auto dash = text.find('-');
    YearMonth ym;
    if (dash == std::string_view::npos || !parse_int(text.substr(0, dash), ym.year)) {
        fail(ErrorCode::Parse, "malformed year-month '" + std::string(text) + "'");
    }
    auto rest = text.substr(dash + 1);
    // Accept YYYY-MM-DD by ignoring the day.
    if (auto dash2 = rest.find('-'); dash2 != std::string_view::npos) {
        rest = rest.substr(0, dash2);
    }
    if (!parse_int(rest, ym.month) || ym.month < 1 || ym.month > 12) {
        fail(ErrorCode::Parse, "malformed year-month '" + std::string(text) + "'");
    }
    return ym;
}

std::string YearMonth::to_string() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
    return buf;
}

YearMonth YearMonth::plus_months(long months) const {
    long index = static_cast<long>(year) * 12 + (month - 1) + months;
    long y = index >= 0 ? index / 12 : (index - 11) / 12;
    return YearMonth{static_cast<int>(y), static_cast<int>(index - y * 12) + 1};
}

long YearMonth::months_since(const YearMonth& other) const {
    return (static_cast<long>(year) * 12 + month) - (static_cast<long>(other.year) * 12 + other.month);
}

TimeSeries::TimeSeries(YearMonth start, int period, std::vector<double> values)
    : start_(start), period_(period), values_(std::move(values)) {
    require(period_ >= 2, ErrorCode::InvalidArgument, "period must be at least 2");
    require(!values_.empty(), ErrorCode::InsufficientData, "time series is empty");
    for (double v : values_) {
        require(std::isfinite(v), ErrorCode::InvalidArgument, "time series contains a non-finite value");
    }
}

TimeSeries TimeSeries::with_values(std::vector<double> values) const {
    require(values.size() == values_.size(), ErrorCode::DimensionMismatch, "replacement values have a different length");
    return TimeSeries(start_, period_, std::move(values));
}

TimeSeries TimeSeries::prefix(std::size_t n) const {
    require(n >= 1 && n <= values_.size(), ErrorCode::InvalidArgument, "prefix length out of range");
    return TimeSeries(start_, period_, std::vector<double>(values_.begin(), values_.begin() + static_cast<long>(n)));
}

SummaryStats summary_stats(std::span<const double> values) {
    require(!values.empty(), ErrorCode::InsufficientData, "summary statistics of an empty sample");
    SummaryStats s;
    s.count = values.size();
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    s.min = sorted.front();
    s.max = sorted.back();
    const std::size_t n = sorted.size();
    s.median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    s.mean = sum / static_cast<double>(n);
    if (n > 1) {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - s.mean) * (v - s.mean);
        }
        s.std = std::sqrt(ss / static_cast<double>(n - 1));
    }
    return s;
}

SupervisedDataset SupervisedDataset::slice(std::size_t begin, std::size_t end) const {
    require(begin <= end && end <= rows(), ErrorCode::InvalidArgument, "row slice out of range");
    SupervisedDataset out;
    const auto count = static_cast<Eigen::Index>(end - begin);
    out.features = features.middleRows(static_cast<Eigen::Index>(begin), count);
    out.targets = targets.segment(static_cast<Eigen::Index>(begin), count);
    out.lag = lag;
    out.timestamps.assign(timestamps.begin() + static_cast<long>(begin), timestamps.begin() + static_cast<long>(end));
    return out;
}

SupervisedDataset SupervisedDataset::select(std::span<const std::size_t> rows_wanted) const {
    SupervisedDataset out;
    out.lag = lag;
    out.features.resize(static_cast<Eigen::Index>(rows_wanted.size()), features.cols());
    out.targets.resize(static_cast<Eigen::Index>(rows_wanted.size()));
    for (std::size_t i = 0; i < rows_wanted.size(); ++i) {
        require(rows_wanted[i] < rows(), ErrorCode::InvalidArgument, "row index out of range");
        const auto r = static_cast<Eigen::Index>(rows_wanted[i]);
        out.features.row(static_cast<Eigen::Index>(i)) = features.row(r);
        out.targets(static_cast<Eigen::Index>(i)) = targets(r);
        out.timestamps.push_back(timestamps[rows_wanted[i]]);
    }
    return out;
}

SupervisedDataset lag_embed(std::span<const double> values, int lag) {
    require(lag >= 1, ErrorCode::InvalidArgument, "lag must be at least 1");
    require(values.size() > static_cast<std::size_t>(lag), ErrorCode::InsufficientData,
            "series of length " + std::to_string(values.size()) + " is too short for lag " + std::to_string(lag));
    const std::size_t rows = values.size() - static_cast<std::size_t>(lag);
    SupervisedDataset data;
    data.lag = lag;
    data.features.resize(static_cast<Eigen::Index>(rows), lag);
    data.targets.resize(static_cast<Eigen::Index>(rows));
    data.timestamps.resize(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        const std::size_t t = i + static_cast<std::size_t>(lag);
        data.targets(static_cast<Eigen::Index>(i)) = values[t];
        data.timestamps[i] = t;
        for (int j = 0; j < lag; ++j) {
            data.features(static_cast<Eigen::Index>(i), j) = values[t - 1 - static_cast<std::size_t>(j)];
        }
    }
    return data;
}

std::size_t train_rows_for(std::size_t rows, double ratio) {
    require(ratio > 0.0 && ratio <= 1.0, ErrorCode::InvalidArgument, "split ratio must lie in (0, 1]");
    // The epsilon keeps products such as 0.29 * 100 from flooring to 28.
    auto n = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(rows) + 1e-9));
    return std::min(n, rows);
}

ChronoSplit chrono_split(const SupervisedDataset& data, double ratio) {
    require(data.rows() > 0, ErrorCode::InsufficientData, "cannot split an empty dataset");
    const std::size_t n_train = train_rows_for(data.rows(), ratio);
    return ChronoSplit{data.slice(0, n_train), data.slice(n_train, data.rows()), ratio};
}

TimeSeries gen_synthetic(const SyntheticSpec& spec) {
    require(spec.n > 0 && spec.period > 0, ErrorCode::InvalidArgument, "n and period must be positive");
    require(spec.period >= 2, ErrorCode::InvalidArgument, "period must be at least 2");
    require(spec.n > 2 * spec.period, ErrorCode::InvalidArgument, "n must exceed two seasonal periods");
    require(spec.noise_std >= 0.0, ErrorCode::InvalidArgument, "noise_std must be nonnegative");

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> values(static_cast<std::size_t>(spec.n));
    for (int t = 0; t < spec.n; ++t) {
        const double season = std::sin(2.0 * std::numbers::pi * t / spec.period);
        double v = spec.trend_slope * t + spec.seasonal_amplitude * season;
        if (spec.noise_std > 0.0) {
            v += spec.noise_std * noise(rng);
        }
        values[static_cast<std::size_t>(t)] = v;
    }
    return TimeSeries(spec.start, spec.period, std::move(values));
}

TimeSeries load_csv(const std::filesystem::path& path, const CsvSchema& schema, int period) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorCode::Io, "cannot open '" + path.string() + "'");

    std::string line;
    std::size_t line_no = 0;
    int date_idx = -1;
    int value_idx = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        // Strip a UTF-8 byte-order mark on the header.
        if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
            line.erase(0, 3);
        }
        auto header = split_commas(line);
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == schema.date_column) date_idx = static_cast<int>(i);
            if (header[i] == schema.value_column) value_idx = static_cast<int>(i);
        }
        break;
    }
    require(date_idx >= 0 && value_idx >= 0, ErrorCode::Parse,
            path.string() + ": header must contain columns '" + schema.date_column + "' and '" + schema.value_column + "'");

    std::map<YearMonth, double> rows;
    const auto needed = static_cast<std::size_t>(std::max(date_idx, value_idx));
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        auto fields = split_commas(line);
        const std::string where = path.string() + ":" + std::to_string(line_no);
        require(fields.size() > needed, ErrorCode::Parse, where + ": expected at least " + std::to_string(needed + 1) + " fields");
        YearMonth ym;
        try {
            ym = YearMonth::parse(fields[static_cast<std::size_t>(date_idx)]);
        } catch (const Error& e) {
            fail(ErrorCode::Parse, where + ": " + e.what());
        }
        double value = 0.0;
        require(parse_real(fields[static_cast<std::size_t>(value_idx)], value), ErrorCode::Parse,
                where + ": unparseable count '" + std::string(fields[static_cast<std::size_t>(value_idx)]) + "'");
        require(rows.emplace(ym, value).second, ErrorCode::DuplicateMonth, where + ": duplicate month " + ym.to_string());
    }
    require(!rows.empty(), ErrorCode::InsufficientData, path.string() + ": no data rows");

    std::vector<double> values;
    values.reserve(rows.size());
    YearMonth expected = rows.begin()->first;
    for (const auto& [ym, v] : rows) {
        require(ym == expected, ErrorCode::DataGap, path.string() + ": gap in months, missing " + expected.to_string());
        values.push_back(v);
        expected = expected.plus_months(1);
    }
    return TimeSeries(rows.begin()->first, period, std::move(values));
}

std::string format_double(double value) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) {
        fail(ErrorCode::Internal, "number formatting failed");
    }
    return std::string(buf.data(), ptr);
}

void write_csv(const TimeSeries& series, const std::filesystem::path& path, const CsvSchema& schema) {
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorCode::Io, "cannot write '" + path.string() + "'");
    out << schema.date_column << ',' << schema.value_column << '\n';
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << series.month_at(i).to_string() << ',' << format_double(series[i]) << '\n';
    }
    require(static_cast<bool>(out), ErrorCode::Io, "write failed for '" + path.string() + "'");
}

} // namespace stlens
