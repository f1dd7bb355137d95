#include "helpers.hpp"

#include "stlens/config.hpp"
#include "stlens/ensemble.hpp"
#include "stlens/error.hpp"

#include <doctest.h>

#include <fstream>

using namespace stlens;

namespace {

constexpr double kSentinel = 9.87654321e8;

TimeSeries ar1_series(std::uint64_t seed, std::size_t n, double phi) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> e(0.0, 1.0);
    std::vector<double> v(n);
    v[0] = 50.0;
    for (std::size_t t = 1; t < n; ++t) v[t] = 50.0 + phi * (v[t - 1] - 50.0) + e(rng);
    return TimeSeries(YearMonth{2000, 1}, 12, std::move(v));
}

// Copy of `s` with every index >= from replaced by a sentinel.
TimeSeries poisoned(const TimeSeries& s, std::size_t from) {
    std::vector<double> v(s.values().begin(), s.values().end());
    for (std::size_t i = from; i < v.size(); ++i) v[i] = kSentinel + static_cast<double>(i);
    return s.with_values(std::move(v));
}

PipelineVariant fast_nondecomposed(LearnerKind kind = LearnerKind::Knn) {
    return preset_variant(std::string(kind_name(kind)));
}

PipelineVariant fast_decomposed(DecompositionMode mode) {
    auto v = preset_variant("stl-knn");
    v.decomposition = mode;
    return v;
}

} // namespace

TEST_CASE("recursion matches a brute-force two-step oracle on AR(1) data") {
    const auto s = ar1_series(1, 200, 0.8);
    const std::vector<double> y(s.values().begin(), s.values().end());
    // Linear one-step model with nonzero weight on every lag.
    const std::vector<double> w{0.6, 0.15, -0.05, 0.1, 0.02, 0.0, -0.03, 0.04, 0.01, 0.05};
    const OneStepPredictor f = [&](std::span<const double> lags) {
        double out = 5.0;
        for (std::size_t j = 0; j < w.size(); ++j) out += w[j] * lags[j];
        return out;
    };
    for (std::size_t t = 11; t < y.size(); ++t) {
        // y_hat(t-1) from y(t-2..t-11), then y_hat(t) from [y_hat(t-1), y(t-2..t-10)].
        double first = 5.0;
        for (std::size_t j = 0; j < 10; ++j) first += w[j] * y[t - 2 - j];
        double second = 5.0 + w[0] * first;
        for (std::size_t j = 1; j < 10; ++j) second += w[j] * y[t - 1 - j];
        CHECK(std::abs(recursive_forecast(f, y, 10, 2, t) - second) < 1e-10);

        double one = 5.0;
        for (std::size_t j = 0; j < 10; ++j) one += w[j] * y[t - 1 - j];
        CHECK(std::abs(recursive_forecast(f, y, 10, 1, t) - one) < 1e-10);
    }
}

TEST_CASE("a perfect one-step model gives exact two-step forecasts") {
    // Deterministic lag-3 recurrence; the predictor is the recurrence itself.
    auto next = [](double a, double b, double c) { return 0.5 * a - 0.2 * b + 0.1 * c + 1.0; };
    std::vector<double> y{1.0, 2.0, 3.0};
    for (int i = 0; i < 60; ++i) {
        const std::size_t n = y.size();
        y.push_back(next(y[n - 1], y[n - 2], y[n - 3]));
    }
    const OneStepPredictor oracle = [&](std::span<const double> l) { return next(l[0], l[1], l[2]); };
    for (std::size_t t = 4; t < y.size(); ++t) {
        CHECK(recursive_forecast(oracle, y, 3, 1, t) == doctest::Approx(y[t]).epsilon(1e-14));
        CHECK(recursive_forecast(oracle, y, 3, 2, t) == doctest::Approx(y[t]).epsilon(1e-14));
    }
}

TEST_CASE("recursion never reads the forecast origin's future") {
    const auto s = ar1_series(2, 80, 0.5);
    const std::vector<double> clean(s.values().begin(), s.values().end());
    const OneStepPredictor f = [](std::span<const double> l) {
        double sum = 0.0;
        for (double v : l) sum += v;
        return sum / static_cast<double>(l.size());
    };
    for (int h : {1, 2}) {
        for (std::size_t t = 12; t < clean.size(); ++t) {
            auto dirty = clean;
            for (std::size_t i = t - static_cast<std::size_t>(h) + 1; i < dirty.size(); ++i) dirty[i] = kSentinel;
            CHECK(recursive_forecast(f, dirty, 10, h, t) == recursive_forecast(f, clean, 10, h, t));
        }
    }
    CHECK_THROWS_AS(recursive_forecast(f, clean, 10, 3, 20), Error);
    CHECK_THROWS_AS(recursive_forecast(f, clean, 10, 2, 10), Error);
}

TEST_CASE("pipeline forecasts are unchanged when future values are poisoned") {
    const auto s = testing::fire_like(3, 200);
    for (const auto& variant : {fast_nondecomposed(), fast_nondecomposed(LearnerKind::Mars),
                                fast_decomposed(DecompositionMode::Causal)}) {
        const auto pipeline = fit_pipeline(variant, s, 0.70);
        for (int h : {1, 2}) {
            const std::size_t first = std::max(pipeline.first_test_index(), first_forecastable_index(variant, h));
            for (std::size_t t = first; t < s.size(); t += 7) {
                const auto clean = forecast_recursive(pipeline, h, t, t + 1);
                const auto dirty_obs = poisoned(s, t - static_cast<std::size_t>(h) + 1);
                const auto dirty = forecast_recursive(pipeline, h, t, t + 1, &dirty_obs);
                CHECK(dirty.recomposed[0] == clean.recomposed[0]);
            }
        }
    }
}

TEST_CASE("causal and nondecomposed fits ignore values after the training rows") {
    const auto s = testing::fire_like(4, 180);
    for (const auto& variant : {fast_nondecomposed(LearnerKind::Svr), fast_decomposed(DecompositionMode::Causal)}) {
        const auto clean = fit_pipeline(variant, s, 0.70);
        const auto dirty_series = poisoned(s, clean.first_test_index());
        const auto dirty = fit_pipeline(variant, dirty_series, 0.70);
        const std::size_t t = clean.first_test_index();
        // Forecast the first test target from clean observations with both fits.
        const auto a = forecast_recursive(clean, 1, t, t + 1, &s);
        const auto b = forecast_recursive(dirty, 1, t, t + 1, &s);
        CHECK(a.recomposed[0] == b.recomposed[0]);
    }
}

TEST_CASE("validation-mode grid search never reads test targets") {
    const auto s = testing::fire_like(5, 170);
    const std::array<LearnerKind, 2> kinds{LearnerKind::Knn, LearnerKind::Mars};
    const auto candidates = GridCandidates::from_kinds(kinds, kinds, kinds);
    GridSearchConfig config;
    config.initial_window = 90;
    config.jobs = 1;
    for (auto mode : {DecompositionMode::Full, DecompositionMode::Causal}) {
        for (int h : {1, 2}) {
            config.horizon = h;
            const auto base = fast_decomposed(mode);
            const std::size_t n_train = train_rows_for(s.size() - 10, config.split_ratio);
            const auto clean = grid_search(candidates, s, base, config);
            const auto dirty = grid_search(candidates, poisoned(s, 10 + n_train), base, config);
            REQUIRE(clean.size() == 8);
            for (std::size_t i = 0; i < clean.size(); ++i) {
                CHECK(clean[i].indices == dirty[i].indices);
                CHECK(clean[i].score == dirty[i].score);
            }
        }
    }
    // Test selection does read the test targets.
    config.selection = Selection::Test;
    config.horizon = 1;
    const auto base = fast_decomposed(DecompositionMode::Causal);
    const auto clean = grid_search(candidates, s, base, config);
    const auto dirty = grid_search(candidates, poisoned(s, 10 + train_rows_for(s.size() - 10, 0.70)), base, config);
    CHECK(clean.front().score != dirty.front().score);
}

TEST_CASE("recomposed forecast is the sum of the component forecasts") {
    const auto s = testing::fire_like(6, 255);
    for (const auto& name : {"stl-ensemble-1", "stl-ensemble-2"}) {
        const auto pipeline = fit_pipeline(preset_variant(name), s, 0.70);
        for (int h : {1, 2}) {
            const auto r = forecast_test(pipeline, h);
            REQUIRE(r.components.size() == 3);
            REQUIRE(r.recomposed.size() == 74);
            for (std::size_t i = 0; i < r.recomposed.size(); ++i) {
                CHECK(r.recomposed[i] == (r.components[0][i] + r.components[1][i]) + r.components[2][i]);
                CHECK(r.observed[i] == s[r.timestamps[i]]);
            }
        }
    }
}

TEST_CASE("dropping the remainder models two components") {
    const auto s = testing::fire_like(7, 200);
    auto v = preset_variant("stl-mars");
    v.drop_remainder = true;
    const auto pipeline = fit_pipeline(v, s, 0.70);
    CHECK(pipeline.models().size() == 2);
    const auto r = forecast_test(pipeline, 1);
    for (std::size_t i = 0; i < r.recomposed.size(); ++i) CHECK(r.recomposed[i] == r.components[0][i] + r.components[1][i]);
}

TEST_CASE("forecasts past the end of the data have no observed value") {
    const auto s = testing::fire_like(8, 120);
    const auto pipeline = fit_pipeline(fast_nondecomposed(), s, 0.70);
    const auto r = forecast_recursive(pipeline, 2, s.size() - 2, s.size() + 2);
    CHECK(r.recomposed.size() == 4);
    CHECK(std::isnan(r.observed.back()));
    CHECK(std::isfinite(r.recomposed.back()));
    CHECK_THROWS_AS(forecast_recursive(pipeline, 1, s.size() - 2, s.size() + 2), Error);
    CHECK_THROWS_AS(forecast_recursive(pipeline, 1, 5, 20), Error);
}

TEST_CASE("homogeneous grid assignment scores like the direct pipeline") {
    const auto s = testing::fire_like(9, 180);
    GridSearchConfig config;
    config.initial_window = 100;
    config.jobs = 1;
    for (auto kind : {LearnerKind::Knn, LearnerKind::Mars, LearnerKind::GlmBoost}) {
        const std::array<LearnerKind, 1> one{kind};
        const auto variant = preset_variant("stl-" + std::string(kind_name(kind)));
        for (auto selection : {Selection::Validation, Selection::Test}) {
            config.selection = selection;
            const auto results = grid_search(GridCandidates::from_kinds(one, one, one), s, variant, config);
            REQUIRE(results.size() == 1);
            CHECK(!results[0].error);
            CHECK(results[0].score == evaluate_variant(variant, s, config));
        }
    }
}

TEST_CASE("grid search covers the cross-product and ranks deterministically") {
    const auto s = testing::fire_like(10, 150);
    GridSearchConfig config;
    config.initial_window = 70;
    config.jobs = 1;
    const auto base = preset_variant("stl-knn");
    const auto serial = grid_search(GridCandidates::all_kinds(), s, base, config);
    CHECK(serial.size() == 216);
    config.jobs = 4;
    const auto parallel = grid_search(GridCandidates::all_kinds(), s, base, config);
    REQUIRE(parallel.size() == 216);
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].indices == parallel[i].indices);
        CHECK(serial[i].score == parallel[i].score);
    }
    for (std::size_t i = 1; i < serial.size(); ++i) {
        CHECK(serial[i - 1].score <= serial[i].score);
        if (serial[i - 1].score == serial[i].score) CHECK(serial[i - 1].indices < serial[i].indices);
    }
}

TEST_CASE("candidate failures are recorded, not fatal") {
    const auto s = testing::fire_like(11, 180);
    GridCandidates g;
    auto broken = default_spec(LearnerKind::Knn);
    std::get<learners::KnnParams>(broken.params).k = 500;
    g.per_component[0] = {default_spec(LearnerKind::Knn), broken};
    g.per_component[1] = {default_spec(LearnerKind::Knn)};
    g.per_component[2] = {default_spec(LearnerKind::Knn)};
    GridSearchConfig config;
    config.initial_window = 100;
    config.jobs = 1;
    const auto results = grid_search(g, s, preset_variant("stl-knn"), config);
    REQUIRE(results.size() == 2);
    CHECK(!results[0].error);
    CHECK(results[1].error);
    CHECK(std::isinf(results[1].score));

    GridCandidates empty;
    CHECK_THROWS_AS(grid_search(empty, s, preset_variant("stl-knn"), config), Error);
}

TEST_CASE("comparison rows per horizon") {
    const auto s = testing::fire_like(12, 255);
    const std::vector<std::string> h1{"STL-Ensemble-1", "STL-MARS", "STL-SVR", "STL-GLMBoost", "MARS", "SVR", "GLMBoost"};
    const std::vector<std::string> h2{"STL-Ensemble-2", "STL-KNN", "STL-CUBIST", "STL-MLP", "k-NN", "CUBIST", "MLP"};
    for (int h : {1, 2}) {
        const auto c = run_comparison(s, h);
        const auto& expected = h == 1 ? h1 : h2;
        REQUIRE(c.report.rows.size() == expected.size());
        CHECK(c.report.baseline == expected[0]);
        for (std::size_t i = 0; i < expected.size(); ++i) {
            CHECK(c.report.rows[i].model == expected[i]);
            CHECK(std::isfinite(c.report.rows[i].metrics.rrmse));
            CHECK(c.entries[i].pca_components.size() == (i < 4 ? 3u : 1u));
        }
    }
}

TEST_CASE("preset labels and variants") {
    CHECK(preset_label("stl-ensemble-1") == "STL-Ensemble-1");
    CHECK(preset_label("stl-glmboost") == "STL-GLMBoost");
    CHECK(preset_label("knn") == "k-NN");
    const auto e1 = preset_variant("stl-ensemble-1");
    CHECK(e1.components[0].kind() == LearnerKind::Svr);
    CHECK(e1.components[1].kind() == LearnerKind::Mars);
    CHECK(e1.components[2].kind() == LearnerKind::GlmBoost);
    const auto e2 = preset_variant("stl-ensemble-2");
    CHECK(e2.components[0].kind() == LearnerKind::Cubist);
    CHECK(e2.components[1].kind() == LearnerKind::Knn);
    CHECK(e2.components[2].kind() == LearnerKind::Mlp);
    CHECK(e1.lag == 10);
    CHECK(e1.pca_threshold == 0.95);
    CHECK(preset_variant("mlp").mode == PipelineMode::Nondecomposed);
    CHECK_THROWS_AS(preset_variant("stl-arima"), Error);
}

TEST_CASE("small series sizes") {
    std::vector<double> v(15);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 10.0 + std::sin(static_cast<double>(i)) * 3.0 + static_cast<double>(i % 4);
    const TimeSeries s(YearMonth{2010, 1}, 12, v);
    // 5 lag rows, 3 of them for training.
    const auto p = fit_pipeline(fast_nondecomposed(LearnerKind::Mars), s, 0.70);
    CHECK(p.train_rows() == 3);
    CHECK(forecast_test(p, 1).recomposed.size() == 2);
    try {
        fit_pipeline(fast_nondecomposed(LearnerKind::Mars), s, 0.30);
        FAIL("expected an insufficient-data error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InsufficientData);
    }
}

TEST_CASE("errors name the failing stage") {
    const TimeSeries tiny(YearMonth{2010, 1}, 12, std::vector<double>{1, 4, 2, 6, 3, 8, 5, 7, 2, 9, 4, 6, 3, 8, 1, 5, 7, 2, 6, 4});
    try {
        fit_pipeline(preset_variant("stl-ensemble-1"), tiny, 0.70);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InsufficientData);
        CHECK(std::string(e.what()).rfind("decompose: ", 0) == 0);
    }
    auto v = preset_variant("stl-knn");
    std::get<learners::KnnParams>(v.components[0].params).k = 500;
    try {
        fit_pipeline(v, testing::fire_like(13, 40), 0.70);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).rfind("fit[seasonal:knn]: ", 0) == 0);
    }
}

TEST_CASE("run configuration") {
    RunConfig c;
    CHECK(c.variant().name == "STL-Ensemble-1");
    c.set("horizon", "2");
    CHECK(c.variant().name == "STL-Ensemble-2");
    c.set("trend", "mars max_terms=5");
    const auto v = c.variant();
    CHECK(v.components[1].kind() == LearnerKind::Mars);
    CHECK(std::get<learners::MarsParams>(v.components[1].params).max_terms == 5);
    CHECK(v.name == "STL-cubist/mars/mlp");
    c.set("decomposition", "train-only");
    CHECK(c.variant().decomposition == DecompositionMode::Causal);
    c.set("stl.outer", "3");
    CHECK(c.variant().stl.outer_iterations == 3);
    CHECK(c.get("stl.outer") == "3");
    CHECK_THROWS_AS(c.set("lags", "3"), Error);
    CHECK_THROWS_AS(c.set("split", "abc"), Error);
    c.set("model", "svr");
    CHECK(c.variant().mode == PipelineMode::Nondecomposed);
    CHECK(c.entries().size() == config_keys().size());

    const auto dir = testing::temp_dir("config");
    std::ofstream(dir / "run.conf") << "# comment\nlag = 6\n\nsplit=0.8\nbogus = 1\n";
    RunConfig f;
    try {
        f.load_file(dir / "run.conf");
        FAIL("expected an unknown-key error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("run.conf:5") != std::string::npos);
    }
    CHECK(f.lag == 6);
    CHECK(f.split == 0.8);
}
