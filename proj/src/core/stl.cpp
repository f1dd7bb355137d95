#include "stlens/stl.hpp"
#include "stlens/error.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace stlens {

namespace {

int next_odd(double value) {
    auto v = static_cast<int>(std::ceil(value));
    return v % 2 == 0 ? v + 1 : v;
}

// Single loess evaluation. `span` may exceed the number of points, in which
// case the bandwidth is widened by (span - n) / 2 average spacings. Returns
// nullopt when every weight in the window is zero.
std::optional<double> loess_at(std::span<const double> x, std::span<const double> y, const double* robustness,
                               int span, int degree, double v, double data_range) {
    const auto n = static_cast<long>(x.size());
    long lo = 0;
    long hi = n - 1;
    double h = 0.0;
    if (span >= n) {
        const double spacing = n > 1 ? (x[static_cast<std::size_t>(n - 1)] - x[0]) / static_cast<double>(n - 1) : 1.0;
        h = std::max(v - x[0], x[static_cast<std::size_t>(n - 1)] - v);
        h += 0.5 * static_cast<double>(span - n) * spacing;
    } else {
        auto it = std::lower_bound(x.begin(), x.end(), v);
        long pos = it - x.begin();
        if (pos == n || (pos > 0 && v - x[static_cast<std::size_t>(pos - 1)] <= x[static_cast<std::size_t>(pos)] - v)) {
            --pos;
        }
        lo = hi = pos;
        while (hi - lo + 1 < span) {
            if (lo == 0) {
                ++hi;
            } else if (hi == n - 1) {
                --lo;
            } else if (v - x[static_cast<std::size_t>(lo - 1)] <= x[static_cast<std::size_t>(hi + 1)] - v) {
                --lo;
            } else {
                ++hi;
            }
        }
        h = std::max(v - x[static_cast<std::size_t>(lo)], x[static_cast<std::size_t>(hi)] - v);
    }

    double sw = 0.0;
    double swx = 0.0;
    double swy = 0.0;
    for (long i = lo; i <= hi; ++i) {
        const auto k = static_cast<std::size_t>(i);
        double w = tricube(std::abs(x[k] - v), h);
        if (robustness != nullptr) {
            w *= robustness[k];
        }
        sw += w;
        swx += w * x[k];
        swy += w * y[k];
    }
    if (!(sw > 0.0)) {
        return std::nullopt;
    }
    const double ybar = swy / sw;
    if (degree == 0) {
        return ybar;
    }
    const double xbar = swx / sw;
    double sxx = 0.0;
    double sxy = 0.0;
    for (long i = lo; i <= hi; ++i) {
        const auto k = static_cast<std::size_t>(i);
        double w = tricube(std::abs(x[k] - v), h);
        if (robustness != nullptr) {
            w *= robustness[k];
        }
        sxx += w * (x[k] - xbar) * (x[k] - xbar);
        sxy += w * (x[k] - xbar) * (y[k] - ybar);
    }
    // Too little spread in the window for a slope: fall back to local constant.
    if (std::sqrt(sxx / sw) <= 1e-3 * data_range) {
        return ybar;
    }
    return ybar + (sxy / sxx) * (v - xbar);
}

// Loess over unit-spaced ordinates 0..n-1, used throughout STL. Points whose
// robustness-weighted window is empty are refit without robustness weights.
std::vector<double> stl_loess(std::span<const double> y, const std::vector<double>* robustness, int span, int degree,
                              long eval_begin, long eval_end) {
    std::vector<double> x(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = static_cast<double>(i);
    }
    const double range = x.empty() ? 0.0 : x.back();
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(eval_end - eval_begin));
    for (long p = eval_begin; p < eval_end; ++p) {
        const auto v = static_cast<double>(p);
        auto fit = loess_at(x, y, robustness ? robustness->data() : nullptr, span, degree, v, range);
        if (!fit && robustness != nullptr) {
            fit = loess_at(x, y, nullptr, span, degree, v, range);
        }
        if (!fit) {
            fail(ErrorCode::Degenerate, "loess window has no positive weights");
        }
        out.push_back(*fit);
    }
    return out;
}

std::vector<double> moving_average(std::span<const double> x, std::size_t len) {
    std::vector<double> out;
    if (x.size() < len) {
        return out;
    }
    out.reserve(x.size() - len + 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
        sum += x[i];
    }
    out.push_back(sum / static_cast<double>(len));
    for (std::size_t i = len; i < x.size(); ++i) {
        sum += x[i] - x[i - len];
        out.push_back(sum / static_cast<double>(len));
    }
    return out;
}

double median_of(std::vector<double> v) {
    const std::size_t n = v.size();
    std::nth_element(v.begin(), v.begin() + static_cast<long>(n / 2), v.end());
    double hi = v[n / 2];
    if (n % 2 == 1) {
        return hi;
    }
    double lo = *std::max_element(v.begin(), v.begin() + static_cast<long>(n / 2));
    return 0.5 * (lo + hi);
}

} // namespace

double tricube(double distance, double max_distance) {
    if (!(max_distance > 0.0)) {
        return distance == 0.0 ? 1.0 : 0.0;
    }
    const double u = std::abs(distance) / max_distance;
    if (u >= 1.0) {
        return 0.0;
    }
    const double a = 1.0 - u * u * u;
    return a * a * a;
}

std::vector<double> loess_smooth(std::span<const double> x, std::span<const double> y, const LoessConfig& config,
                                 std::span<const double> eval_points) {
    require(x.size() == y.size(), ErrorCode::DimensionMismatch, "loess: x and y lengths differ");
    require(config.span >= 3 && config.span % 2 == 1, ErrorCode::InvalidArgument, "loess: span must be an odd integer >= 3");
    require(config.degree == 0 || config.degree == 1, ErrorCode::InvalidArgument, "loess: degree must be 0 or 1");
    require(static_cast<std::size_t>(config.span) <= x.size(), ErrorCode::InsufficientData, "loess: span exceeds data length");
    for (std::size_t i = 1; i < x.size(); ++i) {
        require(x[i] > x[i - 1], ErrorCode::InvalidArgument, "loess: x must be strictly increasing");
    }
    const double* rw = nullptr;
    if (config.weights) {
        require(config.weights->size() == x.size(), ErrorCode::DimensionMismatch, "loess: one weight per point required");
        rw = config.weights->data();
    }
    const double range = x.back() - x.front();
    std::vector<double> out;
    out.reserve(eval_points.size());
    for (double v : eval_points) {
        auto fit = loess_at(x, y, rw, config.span, config.degree, v, range);
        require(fit.has_value(), ErrorCode::Degenerate, "loess: all weights in the window are zero");
        out.push_back(*fit);
    }
    return out;
}

int default_trend_span(int period, int seasonal_span) {
    return next_odd(1.5 * period / (1.0 - 1.5 / seasonal_span));
}

StlConfig StlConfig::resolved(std::size_t series_length) const {
    StlConfig c = *this;
    require(c.period >= 2, ErrorCode::InvalidArgument, "stl: period must be at least 2");
    require(series_length >= 2 * static_cast<std::size_t>(c.period), ErrorCode::InsufficientData,
            "stl: series must cover at least two periods");
    require(c.periodic() || (c.seasonal_span >= 3 && c.seasonal_span % 2 == 1), ErrorCode::InvalidArgument,
            "stl: seasonal span must be odd and >= 3 (or periodic)");
    require(c.seasonal_degree == 0 || c.seasonal_degree == 1, ErrorCode::InvalidArgument, "stl: seasonal degree must be 0 or 1");
    require(c.inner_iterations >= 0 && c.outer_iterations >= 0, ErrorCode::InvalidArgument, "stl: iteration counts must be nonnegative");
    const int effective_seasonal = c.periodic() ? 10 * static_cast<int>(series_length) + 1 : c.seasonal_span;
    if (c.trend_span == 0) {
        c.trend_span = default_trend_span(c.period, effective_seasonal);
    }
    if (c.lowpass_span == 0) {
        c.lowpass_span = next_odd(c.period);
    }
    require(c.trend_span >= 3 && c.trend_span % 2 == 1 && c.trend_span >= c.period, ErrorCode::InvalidArgument,
            "stl: trend span must be odd, >= 3 and >= period");
    require(c.lowpass_span >= 3 && c.lowpass_span % 2 == 1, ErrorCode::InvalidArgument, "stl: low-pass span must be odd and >= 3");
    return c;
}

DecomposedSeries stl_decompose(const TimeSeries& series, const StlConfig& config) {
    const StlConfig cfg = config.resolved(series.size());
    const std::size_t n = series.size();
    const auto np = static_cast<std::size_t>(cfg.period);
    const std::span<const double> y = series.values();

    std::vector<double> trend(n, 0.0);
    std::vector<double> seasonal(n, 0.0);
    std::vector<double> rw(n, 1.0);
    bool robust = false;

    std::vector<double> detrended(n);
    std::vector<double> cycle(n + 2 * np);
    std::vector<double> sub_y;
    std::vector<double> sub_w;

    auto inner_loop = [&] {
        for (int iter = 0; iter < cfg.inner_iterations; ++iter) {
            for (std::size_t t = 0; t < n; ++t) {
                detrended[t] = y[t] - trend[t];
            }
            // Cycle-subseries smoothing, extended one cycle on each side.
            for (std::size_t j = 0; j < np; ++j) {
                sub_y.clear();
                sub_w.clear();
                for (std::size_t t = j; t < n; t += np) {
                    sub_y.push_back(detrended[t]);
                    sub_w.push_back(rw[t]);
                }
                const auto m = static_cast<long>(sub_y.size());
                std::vector<double> smoothed;
                if (cfg.periodic()) {
                    double sw = 0.0;
                    double swy = 0.0;
                    for (std::size_t k = 0; k < sub_y.size(); ++k) {
                        sw += sub_w[k];
                        swy += sub_w[k] * sub_y[k];
                    }
                    double mean = 0.0;
                    if (sw > 0.0) {
                        mean = swy / sw;
                    } else {
                        for (double v : sub_y) mean += v;
                        mean /= static_cast<double>(m);
                    }
                    smoothed.assign(static_cast<std::size_t>(m + 2), mean);
                } else {
                    smoothed = stl_loess(sub_y, robust ? &sub_w : nullptr, cfg.seasonal_span, cfg.seasonal_degree, -1, m + 1);
                }
                for (long p = 0; p < m + 2; ++p) {
                    cycle[j + static_cast<std::size_t>(p) * np] = smoothed[static_cast<std::size_t>(p)];
                }
            }
            // Every index of [0, n + 2 np) is written: j + (m_j + 1) np lands in the last cycle.

            auto ma1 = moving_average(cycle, np);
            auto ma2 = moving_average(ma1, np);
            auto ma3 = moving_average(ma2, 3);
            auto lowpass = stl_loess(ma3, nullptr, cfg.lowpass_span, 1, 0, static_cast<long>(n));

            for (std::size_t t = 0; t < n; ++t) {
                seasonal[t] = cycle[t + np] - lowpass[t];
                detrended[t] = y[t] - seasonal[t];
            }
            trend = stl_loess(detrended, robust ? &rw : nullptr, cfg.trend_span, 1, 0, static_cast<long>(n));
        }
    };

    inner_loop();
    for (int outer = 0; outer < cfg.outer_iterations; ++outer) {
        std::vector<double> abs_r(n);
        for (std::size_t t = 0; t < n; ++t) {
            abs_r[t] = std::abs(y[t] - seasonal[t] - trend[t]);
        }
        const double h = 6.0 * median_of(abs_r);
        for (std::size_t t = 0; t < n; ++t) {
            const double r = abs_r[t];
            if (r <= 1e-3 * h) {
                rw[t] = 1.0;
            } else if (r <= 0.999 * h) {
                const double u = r / h;
                rw[t] = (1.0 - u * u) * (1.0 - u * u);
            } else {
                rw[t] = 0.0;
            }
        }
        robust = true;
        inner_loop();
    }

    DecomposedSeries out;
    out.start = series.start();
    out.period = cfg.period;
    out.observed.assign(y.begin(), y.end());
    out.seasonal = std::move(seasonal);
    out.trend = std::move(trend);
    out.remainder.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        out.remainder[t] = y[t] - out.seasonal[t] - out.trend[t];
    }
    out.robustness_weights = std::move(rw);
    out.config = cfg;
    return out;
}

TimeSeries recompose(const DecomposedSeries& parts) {
    const std::size_t n = parts.seasonal.size();
    require(parts.trend.size() == n && parts.remainder.size() == n && n > 0, ErrorCode::DimensionMismatch,
            "recompose: component lengths differ");
    std::vector<double> values(n);
    for (std::size_t t = 0; t < n; ++t) {
        values[t] = parts.seasonal[t] + parts.trend[t] + parts.remainder[t];
    }
    return TimeSeries(parts.start, parts.period, std::move(values));
}

} // namespace stlens
