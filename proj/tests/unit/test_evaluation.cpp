#include "helpers.hpp"

#include "stlens/error.hpp"
#include "stlens/evaluation.hpp"

#include <doctest.h>

#include <sstream>

using namespace stlens;

namespace {

// Direct evaluation of the metric formulas, written independently.
double rrmse_oracle(const std::vector<double>& y, const std::vector<double>& p) {
    long double sse = 0, sum = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        sse += (long double)(y[i] - p[i]) * (y[i] - p[i]);
        sum += y[i];
    }
    const long double n = y.size();
    return static_cast<double>(std::sqrt(sse / n) / (sum / n));
}

double r2_oracle(const std::vector<double>& y, const std::vector<double>& p) {
    long double sum = 0;
    for (double v : y) sum += v;
    const long double mean = sum / y.size();
    long double rss = 0, tss = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        rss += (long double)(y[i] - p[i]) * (y[i] - p[i]);
        tss += (y[i] - mean) * (y[i] - mean);
    }
    return static_cast<double>(1.0L - rss / tss);
}

// Scratch Diebold-Mariano: squared-error loss, rectangular window of h - 1 lags.
double dm_oracle(const std::vector<double>& a, const std::vector<double>& b, int h) {
    const std::size_t n = a.size();
    std::vector<long double> d(n);
    long double mean = 0;
    for (std::size_t t = 0; t < n; ++t) {
        d[t] = (long double)a[t] * a[t] - (long double)b[t] * b[t];
        mean += d[t];
    }
    mean /= n;
    long double v = 0;
    for (int k = 0; k < h; ++k) {
        long double g = 0;
        for (std::size_t t = static_cast<std::size_t>(k); t < n; ++t) g += (d[t] - mean) * (d[t - k] - mean);
        g /= n;
        v += (k == 0 ? 1 : 2) * g;
    }
    return static_cast<double>(mean / std::sqrt(v / n));
}

} // namespace

TEST_CASE("rrmse examples") {
    CHECK(rrmse(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}) == 0.0);
    CHECK(rrmse(std::vector<double>{2, 2}, std::vector<double>{3, 1}) == doctest::Approx(0.5));
    CHECK_THROWS_AS(rrmse(std::vector<double>{1, -1}, std::vector<double>{0, 0}), Error);
    CHECK_THROWS_AS(rrmse(std::vector<double>{1, 2}, std::vector<double>{1}), Error);
    CHECK_THROWS_AS(rrmse(std::vector<double>{}, std::vector<double>{}), Error);
}

TEST_CASE("r squared examples") {
    const std::vector<double> y{1, 4, 2, 8};
    CHECK(r_squared(y, y) == 1.0);
    CHECK(r_squared(y, std::vector<double>(4, 3.75)) == doctest::Approx(0.0));
    CHECK_THROWS_AS(r_squared(std::vector<double>{3, 3, 3}, std::vector<double>{1, 2, 3}), Error);
    CHECK_THROWS_AS(r_squared(std::vector<double>{1, 2}, std::vector<double>{1}), Error);
}

TEST_CASE("metrics match direct formula evaluation on random pairs") {
    std::mt19937_64 rng(100);
    std::uniform_int_distribution<int> len(2, 80);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto n = static_cast<std::size_t>(len(rng));
        const auto y = testing::random_vector(rng, n, 50.0, 10.0);
        const auto p = testing::random_vector(rng, n, 50.0, 12.0);
        CHECK(std::abs(rrmse(y, p) - rrmse_oracle(y, p)) < 1e-12);
        CHECK(std::abs(r_squared(y, p) - r2_oracle(y, p)) < 1e-12 * std::max(1.0, std::abs(r2_oracle(y, p))));
    }
}

TEST_CASE("metric invariance properties") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 50; ++trial) {
        const auto y = testing::random_vector(rng, 30, 20.0, 5.0);
        const auto p = testing::random_vector(rng, 30, 20.0, 6.0);
        for (double alpha : {0.01, 3.0, 1e4}) {
            std::vector<double> ya(y), pa(p);
            for (auto& v : ya) v *= alpha;
            for (auto& v : pa) v *= alpha;
            CHECK(rrmse(ya, pa) == doctest::Approx(rrmse(y, p)).epsilon(1e-12));
        }
        // Translation changes R^2 only through the recentred TSS; compare with the formula.
        std::vector<double> yc(y), pc(p);
        for (auto& v : yc) v += 500.0;
        for (auto& v : pc) v += 500.0;
        CHECK(r_squared(yc, pc) == doctest::Approx(r2_oracle(yc, pc)).epsilon(1e-10));
        CHECK(rrmse(y, y) == 0.0);
        CHECK(r_squared(y, y) == 1.0);
    }
}

TEST_CASE("dm statistic matches the scratch oracle") {
    std::mt19937_64 rng(202);
    for (int h : {1, 2, 3}) {
        for (int trial = 0; trial < 20; ++trial) {
            const auto a = testing::random_vector(rng, 74);
            const auto b = testing::random_vector(rng, 74, 0.0, 1.3);
            const auto r = dm_test(a, b, DmOptions{h, false});
            CHECK(std::abs(r.statistic - dm_oracle(a, b, h)) < 1e-9);
            CHECK(r.p_value == doctest::Approx(std::erfc(std::abs(r.statistic) / std::sqrt(2.0))).epsilon(1e-12));
            CHECK(r.n == 74);
        }
    }
}

TEST_CASE("dm antisymmetry, sign convention and degenerate variance") {
    std::mt19937_64 rng(303);
    const auto a = testing::random_vector(rng, 50);
    const auto b = testing::random_vector(rng, 50);
    CHECK(dm_test(a, b).statistic == doctest::Approx(-dm_test(b, a).statistic).epsilon(1e-12));
    CHECK(dm_test(a, b).p_value == doctest::Approx(dm_test(b, a).p_value).epsilon(1e-12));

    std::vector<double> small(a);
    for (auto& v : small) v *= 0.5;
    CHECK(dm_test(small, a).statistic < 0.0);

    try {
        dm_test(a, a);
        FAIL("expected a degenerate-variance error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Degenerate);
    }
    CHECK_THROWS_AS(dm_test(std::vector<double>(5, 1.0), std::vector<double>(5, 2.0)), Error);
    CHECK_THROWS_AS(dm_test(a, std::vector<double>(49, 1.0)), Error);
    CHECK_THROWS_AS(dm_test(a, b, DmOptions{0, false}), Error);
}

TEST_CASE("dm small-sample correction") {
    std::mt19937_64 rng(404);
    const auto a = testing::random_vector(rng, 40);
    const auto b = testing::random_vector(rng, 40, 0.0, 1.2);
    const auto plain = dm_test(a, b, DmOptions{2, false});
    const auto hln = dm_test(a, b, DmOptions{2, true});
    const double n = 40.0, h = 2.0;
    CHECK(hln.statistic == doctest::Approx(plain.statistic * std::sqrt((n + 1 - 2 * h + h * (h - 1) / n) / n)).epsilon(1e-12));
    CHECK(hln.p_value > 0.0);
    CHECK(hln.p_value <= 1.0);
}

TEST_CASE("dm rejection rate under the null") {
    std::mt19937_64 rng(505);
    int rejections = 0;
    const int draws = 2000;
    for (int i = 0; i < draws; ++i) {
        const auto a = testing::random_vector(rng, 74);
        const auto b = testing::random_vector(rng, 74);
        if (dm_test(a, b).p_value < 0.05) ++rejections;
    }
    const double rate = static_cast<double>(rejections) / draws;
    CHECK(rate >= 0.03);
    CHECK(rate <= 0.07);
}

TEST_CASE("report construction") {
    std::mt19937_64 rng(606);
    const auto y = testing::random_vector(rng, 30, 100.0, 20.0);
    auto noisy = [&](double sd) {
        auto p = y;
        std::normal_distribution<double> e(0.0, sd);
        for (auto& v : p) v += e(rng);
        return p;
    };
    SUBCASE("single model has no DM rows") {
        const auto r = build_report({ModelForecast{"A", y, noisy(5)}}, "A", 1);
        REQUIRE(r.rows.size() == 1);
        CHECK(!r.rows[0].dm);
    }
    SUBCASE("seven models give six DM comparisons") {
        std::vector<ModelForecast> models;
        for (int i = 0; i < 7; ++i) models.push_back(ModelForecast{"M" + std::to_string(i), y, noisy(3.0 + i)});
        const auto r = build_report(models, "M0", 1);
        int dms = 0;
        for (const auto& row : r.rows) dms += row.dm ? 1 : 0;
        CHECK(dms == 6);
        CHECK(!r.row("M0").dm);
        CHECK(r.row("M3").metrics.rrmse == doctest::Approx(rrmse(y, models[3].predicted)));
    }
    SUBCASE("misaligned test periods") {
        auto shifted = y;
        shifted[0] += 1.0;
        CHECK_THROWS_AS(build_report({ModelForecast{"A", y, noisy(1)}, ModelForecast{"B", shifted, noisy(1)}}, "A", 1), Error);
        CHECK_THROWS_AS(build_report({ModelForecast{"A", y, noisy(1)}}, "Z", 1), Error);
    }
}

TEST_CASE("report csv schema is stable") {
    const std::vector<double> y{10, 12, 9, 14, 11, 13, 8, 15, 10, 12, 11, 9};
    std::vector<double> a(y), b(y);
    for (std::size_t i = 0; i < y.size(); ++i) {
        a[i] += (i % 2 ? 0.5 : -0.5);
        b[i] += (i % 3 ? 1.5 : -2.0);
    }
    const auto report = build_report({ModelForecast{"STL-Ensemble-1", y, a}, ModelForecast{"MARS", y, b}}, "STL-Ensemble-1", 1);
    std::ostringstream plain;
    write_report_csv(report, plain);
    std::istringstream lines(plain.str());
    std::string header, first, second;
    std::getline(lines, header);
    std::getline(lines, first);
    std::getline(lines, second);
    CHECK(header == "model,horizon,rrmse,r2,dm_vs_baseline,p_value");
    CHECK(first.rfind("STL-Ensemble-1,1,", 0) == 0);
    CHECK(first.substr(first.size() - 2) == ",,");
    CHECK(std::count(second.begin(), second.end(), ',') == 5);

    std::ostringstream ref;
    write_report_csv(report, ref, true);
    std::istringstream rl(ref.str());
    std::getline(rl, header);
    std::getline(rl, first);
    CHECK(header == "model,horizon,rrmse,r2,dm_vs_baseline,p_value,reference_rrmse,reference_r2");
    CHECK(first.substr(first.size() - 14) == ",0.3197,0.9132");
}

TEST_CASE("reference values") {
    CHECK(reference_metrics("STL-Ensemble-1", 1)->rrmse == 0.3197);
    CHECK(reference_metrics("STL-Ensemble-2", 2)->r_squared == 0.8186);
    CHECK(!reference_metrics("STL-Ensemble-1", 2));
    CHECK(format_significant(0.123456789) == "0.1235");
}
