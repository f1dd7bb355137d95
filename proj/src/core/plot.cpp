#include "stlens/plot.hpp"
#include "stlens/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace stlens {

namespace {

constexpr double kWidth = 900.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 20.0;

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

struct Frame {
    double top;
    double height;
    std::size_t n;
    double lo;
    double hi;

    double x(double i) const { return kLeft + (kWidth - kLeft - kRight) * (n > 1 ? i / static_cast<double>(n - 1) : 0.5); }
    double y(double v) const { return top + height - height * (v - lo) / (hi - lo); }
};

Frame make_frame(double top, double height, std::size_t n, const std::vector<const std::vector<double>*>& data) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto* d : data) {
        for (double v : *d) {
            if (!std::isfinite(v)) continue;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (!std::isfinite(lo)) {
        lo = 0.0;
        hi = 1.0;
    }
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    return Frame{top, height, n, lo - pad, hi + pad};
}

void axes(std::ostream& out, const Frame& f, const YearMonth& start, const std::string& title) {
    const double x0 = kLeft;
    const double x1 = kWidth - kRight;
    out << "<rect x=\"" << fixed(x0) << "\" y=\"" << fixed(f.top) << "\" width=\"" << fixed(x1 - x0) << "\" height=\""
        << fixed(f.height) << "\" fill=\"none\" stroke=\"#888888\"/>\n";
    out << "<text x=\"" << fixed(x0) << "\" y=\"" << fixed(f.top - 6) << "\" font-size=\"13\">" << title << "</text>\n";
    for (int k = 0; k <= 4; ++k) {
        const double v = f.lo + (f.hi - f.lo) * k / 4.0;
        out << "<text x=\"" << fixed(x0 - 6) << "\" y=\"" << fixed(f.y(v) + 4) << "\" font-size=\"10\" text-anchor=\"end\">"
            << tick_label(v) << "</text>\n";
    }
    for (std::size_t i = 0; i < f.n; ++i) {
        const YearMonth m = start.plus_months(static_cast<long>(i));
        if (m.month != 1 || (m.year % 2) != 0) continue;
        const double x = f.x(static_cast<double>(i));
        out << "<line x1=\"" << fixed(x) << "\" y1=\"" << fixed(f.top + f.height) << "\" x2=\"" << fixed(x) << "\" y2=\""
            << fixed(f.top + f.height + 4) << "\" stroke=\"#888888\"/>\n";
        out << "<text x=\"" << fixed(x) << "\" y=\"" << fixed(f.top + f.height + 16)
            << "\" font-size=\"10\" text-anchor=\"middle\">" << m.year << "</text>\n";
    }
}

void polyline(std::ostream& out, const Frame& f, std::size_t first, const std::vector<double>& values,
              const std::string& color, bool dotted) {
    // NaN values split the line into separate runs.
    std::vector<std::string> runs;
    std::string current;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            if (!current.empty()) runs.push_back(std::move(current));
            current.clear();
            continue;
        }
        if (!current.empty()) current += ' ';
        current += fixed(f.x(static_cast<double>(first + i))) + "," + fixed(f.y(values[i]));
    }
    if (!current.empty()) runs.push_back(std::move(current));
    for (const auto& r : runs) {
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\"";
        if (dotted) out << " stroke-dasharray=\"3,3\"";
        out << " points=\"" << r << "\"/>\n";
    }
}

void write_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), ErrorCode::Io, "cannot write " + path.string());
    out << body;
    require(out.good(), ErrorCode::Io, "write failed for " + path.string());
}

} // namespace

void write_decomposition_svg(const DecomposedSeries& parts, const std::filesystem::path& path) {
    require(parts.size() >= 2, ErrorCode::InsufficientData, "plot: decomposition too short");
    constexpr double panel = 160.0;
    constexpr double gap = 40.0;
    const double height = 4 * (panel + gap) + 10;
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(kWidth) << "\" height=\"" << fixed(height)
        << "\" font-family=\"sans-serif\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    const std::array<std::pair<const char*, const std::vector<double>*>, 4> panels{{
        {"observed", &parts.observed},
        {"seasonal", &parts.seasonal},
        {"trend", &parts.trend},
        {"remainder", &parts.remainder},
    }};
    for (std::size_t p = 0; p < panels.size(); ++p) {
        const Frame f = make_frame(gap * 0.75 + static_cast<double>(p) * (panel + gap), panel, parts.size(), {panels[p].second});
        axes(out, f, parts.start, panels[p].first);
        polyline(out, f, 0, *panels[p].second, "#000000", false);
    }
    out << "</svg>\n";
    write_file(path, out.str());
}

void write_forecast_svg(const TimeSeries& observed, const std::vector<PlotLine>& forecasts,
                        std::optional<std::size_t> split_index, const std::filesystem::path& path) {
    require(observed.size() >= 2, ErrorCode::InsufficientData, "plot: series too short");
    std::size_t n = observed.size();
    for (const auto& line : forecasts) n = std::max(n, line.first_index + line.values.size());
    const std::vector<double> obs(observed.values().begin(), observed.values().end());
    std::vector<const std::vector<double>*> data{&obs};
    for (const auto& line : forecasts) data.push_back(&line.values);

    const double height = 420.0;
    const Frame f = make_frame(30.0, 320.0, n, data);
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(kWidth) << "\" height=\"" << fixed(height)
        << "\" font-family=\"sans-serif\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    axes(out, f, observed.start(), "fire spots");
    if (split_index && *split_index < n) {
        const double x = f.x(static_cast<double>(*split_index));
        out << "<line x1=\"" << fixed(x) << "\" y1=\"" << fixed(f.top) << "\" x2=\"" << fixed(x) << "\" y2=\""
            << fixed(f.top + f.height) << "\" stroke=\"#aaaaaa\" stroke-dasharray=\"6,4\"/>\n";
    }
    polyline(out, f, 0, obs, "#000000", false);
    for (const auto& line : forecasts) polyline(out, f, line.first_index, line.values, line.color, line.dotted);

    // Legend below the axis labels.
    double lx = kLeft;
    const double ly = f.top + f.height + 45.0;
    auto legend = [&](const std::string& label, const std::string& color, bool dotted) {
        out << "<line x1=\"" << fixed(lx) << "\" y1=\"" << fixed(ly) << "\" x2=\"" << fixed(lx + 30) << "\" y2=\"" << fixed(ly)
            << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
        if (dotted) out << " stroke-dasharray=\"3,3\"";
        out << "/>\n<text x=\"" << fixed(lx + 36) << "\" y=\"" << fixed(ly + 4) << "\" font-size=\"11\">" << label
            << "</text>\n";
        lx += 60.0 + 7.0 * static_cast<double>(label.size());
    };
    legend("observed", "#000000", false);
    for (const auto& line : forecasts) legend(line.label, line.color, line.dotted);
    out << "</svg>\n";
    write_file(path, out.str());
}

} // namespace stlens
