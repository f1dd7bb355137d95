#include "helpers.hpp"

#include "stlens/error.hpp"
#include "stlens/stl.hpp"

#include <doctest.h>

using namespace stlens;

namespace {

// Local-linear fit at v by solving the 2x2 weighted normal equations.
double wls_oracle(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w, double v) {
    double s0 = 0, s1 = 0, s2 = 0, t0 = 0, t1 = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s0 += w[i];
        s1 += w[i] * x[i];
        s2 += w[i] * x[i] * x[i];
        t0 += w[i] * y[i];
        t1 += w[i] * x[i] * y[i];
    }
    const double det = s0 * s2 - s1 * s1;
    const double a = (t0 * s2 - s1 * t1) / det;
    const double b = (s0 * t1 - s1 * t0) / det;
    return a + b * v;
}

std::vector<double> sum3(const DecomposedSeries& d) {
    std::vector<double> out(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) out[i] = d.seasonal[i] + d.trend[i] + d.remainder[i];
    return out;
}

double rms(const std::vector<double>& v, std::size_t begin, std::size_t end) {
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += v[i] * v[i];
    return std::sqrt(s / static_cast<double>(end - begin));
}

} // namespace

TEST_CASE("tricube endpoints") {
    CHECK(tricube(0.0, 2.0) == 1.0);
    CHECK(tricube(2.0, 2.0) == 0.0);
    CHECK(tricube(1.0, 2.0) == doctest::Approx(0.669921875));
    CHECK(tricube(5.0, 2.0) == 0.0);
}

TEST_CASE("loess reproduces an exactly linear signal") {
    std::vector<double> x(30), y(30);
    for (int i = 0; i < 30; ++i) {
        x[static_cast<std::size_t>(i)] = i;
        y[static_cast<std::size_t>(i)] = 2.0 * i + 1.0;
    }
    for (int span : {3, 5, 11, 29}) {
        const auto fit = loess_smooth(x, y, LoessConfig{span, 1, std::nullopt}, x);
        for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(fit[i] - y[i]) < 1e-10);
    }
}

TEST_CASE("loess at the centre of y = t^2 matches the weighted normal equations") {
    std::vector<double> x{0, 1, 2, 3, 4, 5, 6}, y;
    for (double t : x) y.push_back(t * t);
    const double v = 3.0;
    const auto fit = loess_smooth(x, y, LoessConfig{5, 1, std::nullopt}, std::vector<double>{v});
    // Window = 5 nearest points {1..5}, bandwidth = distance to the farthest.
    std::vector<double> wx{1, 2, 3, 4, 5}, wy{1, 4, 9, 16, 25}, w;
    for (double t : wx) w.push_back(tricube(std::abs(t - v), 2.0));
    CHECK(fit[0] == doctest::Approx(wls_oracle(wx, wy, w, v)).epsilon(1e-12));
}

TEST_CASE("full-span degree-1 loess equals weighted least squares") {
    std::mt19937_64 rng(4);
    std::vector<double> x(15), y = testing::random_vector(rng, 15);
    for (std::size_t i = 0; i < 15; ++i) x[i] = static_cast<double>(i) + 0.1 * static_cast<double>(i % 3);
    std::uniform_real_distribution<double> u(0.2, 1.0);
    std::vector<double> robust(15);
    for (auto& r : robust) r = u(rng);
    for (double v : {0.0, 4.0, 7.3, 14.2}) {
        const auto fit = loess_smooth(x, y, LoessConfig{15, 1, robust}, std::vector<double>{v});
        double h = std::max(v - x.front(), x.back() - v);
        std::vector<double> w(15);
        for (std::size_t i = 0; i < 15; ++i) w[i] = tricube(std::abs(x[i] - v), h) * robust[i];
        CHECK(fit[0] == doctest::Approx(wls_oracle(x, y, w, v)).epsilon(1e-10));
    }
}

TEST_CASE("loess argument errors") {
    std::vector<double> x{0, 1, 2}, y{1, 2, 3};
    auto code = [&](LoessConfig c, std::vector<double> xs) {
        try {
            loess_smooth(xs, y, c, xs);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::Internal;
    };
    CHECK(code(LoessConfig{5, 1, std::nullopt}, x) == ErrorCode::InsufficientData);
    CHECK(code(LoessConfig{4, 1, std::nullopt}, x) == ErrorCode::InvalidArgument);
    CHECK(code(LoessConfig{3, 2, std::nullopt}, x) == ErrorCode::InvalidArgument);
    CHECK(code(LoessConfig{3, 1, std::nullopt}, {0, 0, 1}) == ErrorCode::InvalidArgument);
    CHECK(code(LoessConfig{3, 1, std::vector<double>{0, 0, 0}}, x) == ErrorCode::Degenerate);
}

TEST_CASE("STL default spans") {
    const auto c = StlConfig{}.resolved(255);
    CHECK(c.lowpass_span == 13);
    CHECK(c.trend_span >= c.period);
    CHECK(c.trend_span % 2 == 1);
    CHECK(default_trend_span(12, 7) == 23);
    CHECK(default_trend_span(12, 13) == 21);
    StlConfig bad;
    bad.seasonal_span = 4;
    CHECK_THROWS_AS(bad.resolved(255), Error);
    CHECK_THROWS_AS(StlConfig{}.resolved(23), Error);
}

TEST_CASE("STL on a constant series") {
    const TimeSeries s(YearMonth{2000, 1}, 12, std::vector<double>(60, 42.0));
    const auto d = stl_decompose(s);
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(std::abs(d.trend[i] - 42.0) < 1e-8 * 42.0 + 1e-8);
        CHECK(std::abs(d.seasonal[i]) < 1e-8 * 42.0 + 1e-8);
        CHECK(std::abs(d.remainder[i]) < 1e-8 * 42.0 + 1e-8);
    }
}

TEST_CASE("STL separates a noise-free trend plus sinusoid") {
    SyntheticSpec spec;
    spec.n = 240;
    spec.trend_slope = 0.1;
    spec.seasonal_amplitude = 1.0;
    spec.noise_std = 0.0;
    const auto d = stl_decompose(gen_synthetic(spec));
    CHECK(rms(d.remainder, 12, 228) < 0.05 * rms(d.seasonal, 12, 228));
}

TEST_CASE("STL additivity on random series") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        SyntheticSpec spec;
        spec.n = 60 + static_cast<int>(u(rng) * 200);
        spec.trend_slope = 5.0 * (u(rng) - 0.5);
        spec.seasonal_amplitude = 100.0 * u(rng);
        spec.noise_std = 30.0 * u(rng);
        spec.seed = static_cast<std::uint64_t>(trial);
        const auto s = gen_synthetic(spec);
        StlConfig c;
        if (trial % 3 == 1) c.seasonal_span = 7;
        if (trial % 3 == 2) c.outer_iterations = 3;
        const auto d = stl_decompose(s, c);
        const std::vector<double> y(s.values().begin(), s.values().end());
        const auto back = sum3(d);
        double err = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) err = std::max(err, std::abs(y[i] - back[i]));
        CHECK(err < 1e-9 * testing::max_abs(y));
        const auto r = recompose(d);
        for (std::size_t i = 0; i < y.size(); ++i) CHECK(std::abs(r[i] - y[i]) <= 1e-12 * testing::max_abs(y));
    }
}

TEST_CASE("periodic seasonal has zero mean over each cycle without robustness") {
    const auto s = testing::fire_like(8, 180);
    StlConfig c;
    c.outer_iterations = 0;
    const auto d = stl_decompose(s, c);
    const double sd = summary_stats(s).std;
    for (std::size_t start = 0; start + 12 <= d.size(); ++start) {
        double m = 0.0;
        for (std::size_t i = start; i < start + 12; ++i) m += d.seasonal[i];
        CHECK(std::abs(m / 12.0) <= 1e-6 * sd);
    }
}

TEST_CASE("STL shift and scale equivariance") {
    SyntheticSpec spec;
    spec.n = 120;
    spec.trend_slope = 0.3;
    spec.seasonal_amplitude = 4.0;
    spec.noise_std = 0.0;
    const auto base = gen_synthetic(spec);
    StlConfig c;
    c.outer_iterations = 0;
    const auto d = stl_decompose(base, c);

    std::vector<double> shifted(base.values().begin(), base.values().end());
    for (auto& v : shifted) v += 250.0;
    const auto ds = stl_decompose(base.with_values(shifted), c);
    std::vector<double> scaled(base.values().begin(), base.values().end());
    for (auto& v : scaled) v *= 3.5;
    const auto dk = stl_decompose(base.with_values(scaled), c);
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(std::abs(ds.trend[i] - (d.trend[i] + 250.0)) < 1e-8);
        CHECK(std::abs(ds.seasonal[i] - d.seasonal[i]) < 1e-8);
        CHECK(std::abs(ds.remainder[i] - d.remainder[i]) < 1e-8);
        CHECK(std::abs(dk.trend[i] - 3.5 * d.trend[i]) < 1e-8);
        CHECK(std::abs(dk.seasonal[i] - 3.5 * d.seasonal[i]) < 1e-8);
        CHECK(std::abs(dk.remainder[i] - 3.5 * d.remainder[i]) < 1e-8);
    }
}

TEST_CASE("recompose identities") {
    DecomposedSeries d;
    d.start = YearMonth{2001, 1};
    d.observed = {1, 2, 3};
    d.seasonal = {0, 0, 0};
    d.trend = {0, 0, 0};
    d.remainder = {1, 2, 3};
    const auto r = recompose(d);
    CHECK(r[0] == 1);
    CHECK(r[2] == 3);
    d.trend.pop_back();
    CHECK_THROWS_AS(recompose(d), Error);
}

TEST_CASE("STL rejects short series") {
    const TimeSeries s(YearMonth{}, 12, std::vector<double>(23, 1.0));
    CHECK_THROWS_AS(stl_decompose(s), Error);
}
