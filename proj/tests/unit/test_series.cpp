#include "helpers.hpp"

#include "stlens/error.hpp"
#include "stlens/series.hpp"

#include <doctest.h>

#include <fstream>

using namespace stlens;

namespace {

std::filesystem::path write_text(const std::filesystem::path& dir, const std::string& name, const std::string& text) {
    const auto p = dir / name;
    std::ofstream(p) << text;
    return p;
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Internal;
}

} // namespace

TEST_CASE("year-month parsing and arithmetic") {
    const auto m = YearMonth::parse("1998-06");
    CHECK(m.year == 1998);
    CHECK(m.month == 6);
    CHECK(YearMonth::parse("1998-06-01") == m);
    CHECK(m.plus_months(254).to_string() == "2019-08");
    CHECK(YearMonth{2019, 8}.months_since(m) == 254);
    CHECK(m.plus_months(-6).to_string() == "1997-12");
    CHECK(code_of([] { YearMonth::parse("1998-13"); }) == ErrorCode::Parse);
    CHECK(code_of([] { YearMonth::parse("june"); }) == ErrorCode::Parse);
}

TEST_CASE("time series validation") {
    CHECK_NOTHROW(TimeSeries(YearMonth{1998, 6}, 12, {530.0}));
    CHECK(code_of([] { TimeSeries(YearMonth{}, 1, {1.0}); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { TimeSeries(YearMonth{}, 12, {}); }) == ErrorCode::InsufficientData);
    CHECK(code_of([] { TimeSeries(YearMonth{}, 12, {1.0, NAN}); }) == ErrorCode::InvalidArgument);
    const TimeSeries s(YearMonth{2000, 11}, 12, {1, 2, 3});
    CHECK(s.month_at(2).to_string() == "2001-01");
    CHECK(s.prefix(2).size() == 2);
}

TEST_CASE("summary statistics examples") {
    const auto c = summary_stats(std::vector<double>{5, 5, 5});
    CHECK(c.max == 5);
    CHECK(c.min == 5);
    CHECK(c.mean == 5);
    CHECK(c.median == 5);
    CHECK(c.std == 0);
    const auto s = summary_stats(std::vector<double>{1, 2, 3, 4});
    CHECK(s.mean == doctest::Approx(2.5));
    CHECK(s.median == doctest::Approx(2.5));
    CHECK(s.std == doctest::Approx(1.2909944487358056).epsilon(1e-12));
    CHECK(code_of([] { summary_stats(std::vector<double>{}); }) == ErrorCode::InsufficientData);
}

TEST_CASE("summary statistics agree with a brute-force oracle") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> len(1, 60);
    for (int trial = 0; trial < 100; ++trial) {
        const auto v = testing::random_vector(rng, static_cast<std::size_t>(len(rng)), 50.0, 20.0);
        auto sorted = v;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t n = sorted.size();
        const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;

        const auto s = summary_stats(v);
        CHECK(s.count == n);
        CHECK(s.min == sorted.front());
        CHECK(s.max == sorted.back());
        CHECK(std::abs(s.median - median) < 1e-9);
        CHECK(std::abs(s.mean - mean) < 1e-9);
        CHECK(std::abs(s.std - sd) < 1e-9);
        CHECK(s.min <= s.median);
        CHECK(s.median <= s.max);
    }
}

TEST_CASE("lag embedding") {
    const auto d = lag_embed(std::vector<double>{1, 2, 3}, 1);
    REQUIRE(d.rows() == 2);
    CHECK(d.features(0, 0) == 1);
    CHECK(d.targets(0) == 2);
    CHECK(d.features(1, 0) == 2);
    CHECK(d.targets(1) == 3);

    std::vector<double> eleven(11);
    for (std::size_t i = 0; i < 11; ++i) eleven[i] = static_cast<double>(i);
    CHECK(lag_embed(eleven, 10).rows() == 1);

    std::vector<double> v(255);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i * i % 97);
    for (int lag = 1; lag <= 10; ++lag) {
        const auto e = lag_embed(v, lag);
        CHECK(e.rows() + static_cast<std::size_t>(lag) == v.size());
        for (std::size_t r = 0; r < e.rows(); ++r) {
            const std::size_t t = e.timestamps[r];
            CHECK(e.targets(static_cast<Eigen::Index>(r)) == v[t]);
            for (int j = 0; j < lag; ++j) {
                CHECK(e.features(static_cast<Eigen::Index>(r), j) == v[t - 1 - static_cast<std::size_t>(j)]);
            }
        }
    }
    const auto full = lag_embed(v, 10);
    CHECK(full.rows() == 245);
    CHECK(full.features.cols() == 10);
    CHECK(code_of([&] { lag_embed(eleven, 11); }) == ErrorCode::InsufficientData);
    CHECK(code_of([&] { lag_embed(eleven, 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("chronological split") {
    std::vector<double> v(255);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
    const auto data = lag_embed(v, 10);
    const auto split = chrono_split(data, 0.70);
    CHECK(split.train.rows() == 171);
    CHECK(split.test.rows() == 74);
    CHECK(split.train.timestamps.back() < split.test.timestamps.front());
    for (std::size_t i = 0; i < data.rows(); ++i) {
        const auto idx = static_cast<Eigen::Index>(i);
        const double t = i < 171 ? split.train.targets(idx) : split.test.targets(idx - 171);
        CHECK(t == data.targets(idx));
    }

    const auto ten = lag_embed(std::vector<double>(11, 1.0), 1);
    CHECK(chrono_split(ten, 1.0).train.rows() == 10);
    CHECK(chrono_split(ten, 1.0).test.rows() == 0);
    const auto half = chrono_split(ten, 0.5);
    CHECK(half.train.rows() == 5);
    CHECK(half.test.rows() == 5);
    CHECK(half.train.timestamps.back() < half.test.timestamps.front());
    CHECK(code_of([&] { chrono_split(ten, 0.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("synthetic generator") {
    SyntheticSpec sine;
    sine.noise_std = 0.0;
    const auto s = gen_synthetic(sine);
    CHECK(s.size() == 255);
    CHECK(summary_stats(s).max == doctest::Approx(1.0).epsilon(1e-9));

    SyntheticSpec line;
    line.trend_slope = 1.0;
    line.seasonal_amplitude = 0.0;
    line.noise_std = 0.0;
    const auto l = gen_synthetic(line);
    for (std::size_t t = 0; t < l.size(); ++t) CHECK(l[t] == static_cast<double>(t));

    SyntheticSpec noisy;
    noisy.noise_std = 2.0;
    noisy.seed = 99;
    const auto a = gen_synthetic(noisy);
    const auto b = gen_synthetic(noisy);
    CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));

    SyntheticSpec bad;
    bad.n = 24;
    CHECK(code_of([&] { gen_synthetic(bad); }) == ErrorCode::InvalidArgument);
    bad.n = 0;
    CHECK(code_of([&] { gen_synthetic(bad); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("csv loading") {
    const auto dir = testing::temp_dir("series_csv");
    SUBCASE("single row") {
        const auto s = load_csv(write_text(dir, "one.csv", "date,fire_spots\n1998-06,530\n"));
        CHECK(s.size() == 1);
        CHECK(s.start() == YearMonth{1998, 6});
        CHECK(s[0] == 530);
    }
    SUBCASE("rows in any order are sorted") {
        const auto s = load_csv(write_text(dir, "order.csv", "date,fire_spots\n1998-08,3\n1998-06,1\n1998-07,2\n"));
        CHECK(s.start() == YearMonth{1998, 6});
        CHECK(s[2] == 3);
    }
    SUBCASE("gap names the missing month") {
        try {
            load_csv(write_text(dir, "gap.csv", "date,fire_spots\n1998-06,1\n1998-08,3\n"));
            FAIL("expected a gap error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::DataGap);
            CHECK(std::string(e.what()).find("1998-07") != std::string::npos);
        }
    }
    SUBCASE("duplicate month") {
        CHECK(code_of([&] { load_csv(write_text(dir, "dup.csv", "date,fire_spots\n1998-06,1\n1998-06,2\n")); }) ==
              ErrorCode::DuplicateMonth);
    }
    SUBCASE("bad row reports its line number") {
        try {
            load_csv(write_text(dir, "bad.csv", "date,fire_spots\n1998-06,1\n1998-07,abc\n"));
            FAIL("expected a parse error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::Parse);
            CHECK(std::string(e.what()).find(":3") != std::string::npos);
        }
    }
    SUBCASE("missing file") {
        CHECK(code_of([&] { load_csv(dir / "absent.csv"); }) == ErrorCode::Io);
    }
}

TEST_CASE("csv round trip preserves values and start month") {
    const auto dir = testing::temp_dir("series_roundtrip");
    std::mt19937_64 rng(3);
    const auto v = testing::random_vector(rng, 40, 1000.0, 400.0);
    const TimeSeries s(YearMonth{2003, 9}, 12, v);
    write_csv(s, dir / "s.csv");
    const auto back = load_csv(dir / "s.csv");
    CHECK(back.start() == s.start());
    REQUIRE(back.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(back[i] == s[i]);
}

TEST_CASE("format_double round-trips") {
    std::mt19937_64 rng(5);
    for (double x : testing::random_vector(rng, 200, 0.0, 1e6)) {
        CHECK(std::stod(format_double(x)) == x);
    }
    CHECK(format_double(0.5) == "0.5");
}
