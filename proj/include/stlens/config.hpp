#pragma once

#include "stlens/ensemble.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace stlens {

/// Flat key=value run configuration. Defaults give the reference pipeline.
///
/// Keys: data, date_column, value_column, period, lag, split, pca, horizon,
/// preset, seasonal, trend, remainder, model, out, seed, decomposition,
/// drop_remainder, selection, initial_window, jobs, dm_correction,
/// stl.seasonal_span, stl.trend_span, stl.inner, stl.outer, synth.n,
/// synth.period, synth.slope, synth.amplitude, synth.noise.
struct RunConfig {
    std::string data;
    CsvSchema schema;
    int period = 12;
    int lag = 10;
    double split = 0.70;
    double pca = 0.95;
    int horizon = 1;
    /// Empty: stl-ensemble-1 for h = 1, stl-ensemble-2 for h = 2.
    std::string preset;
    /// Learner specs overriding the preset, e.g. "svr seasonal cost=2".
    std::string seasonal;
    std::string trend;
    std::string remainder;
    /// Nondecomposed learner spec; selects the nondecomposed mode.
    std::string model;
    std::string out = "out";
    std::uint64_t seed = 1;
    DecompositionMode decomposition = DecompositionMode::Full;
    bool drop_remainder = false;
    Selection selection = Selection::Validation;
    std::size_t initial_window = 120;
    unsigned jobs = 0;
    bool dm_correction = false;
    StlConfig stl;
    SyntheticSpec synth;

    /// Sets one key; throws Error(InvalidArgument/Parse) on unknown keys or bad values.
    void set(const std::string& key, const std::string& value);
    /// Reads `key = value` lines; blank lines and `#` comments are skipped.
    void load_file(const std::filesystem::path& path);
    std::string get(const std::string& key) const;
    /// Every key with its current value, in a stable order.
    std::vector<std::pair<std::string, std::string>> entries() const;

    /// The pipeline selected by preset / component / model keys.
    PipelineVariant variant() const;
    GridSearchConfig grid() const;
    ComparisonOptions comparison() const;
};

std::vector<std::string> config_keys();

} // namespace stlens
