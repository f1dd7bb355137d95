#include "stlens/config.hpp"
#include "stlens/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>

namespace stlens {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    T v{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    require(ec == std::errc{} && ptr == text.data() + text.size(), ErrorCode::Parse,
            "config '" + key + "': cannot parse '" + text + "'");
    if constexpr (std::is_floating_point_v<T>) {
        require(std::isfinite(v), ErrorCode::Parse, "config '" + key + "': value must be finite");
    }
    return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
    if (text == "0" || text == "false" || text == "no" || text == "off") return false;
    fail(ErrorCode::Parse, "config '" + key + "': expected a boolean, got '" + text + "'");
}

std::string show(bool b) { return b ? "true" : "false"; }
std::string show(double v) { return format_double(v); }
template <class T>
std::string show(T v) { return std::to_string(v); }

struct Key {
    const char* name;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define STLENS_NUM(key, member, type)                                                                              \
    Key { key, [](RunConfig& c, const std::string& v) { c.member = parse_number<type>(key, v); },                 \
          [](const RunConfig& c) { return show(c.member); } }
#define STLENS_STR(key, member)                                                                                    \
    Key { key, [](RunConfig& c, const std::string& v) { c.member = v; }, [](const RunConfig& c) { return c.member; } }

const std::vector<Key>& keys() {
    static const std::vector<Key> table{
        STLENS_STR("data", data),
        STLENS_STR("date_column", schema.date_column),
        STLENS_STR("value_column", schema.value_column),
        STLENS_NUM("period", period, int),
        STLENS_NUM("lag", lag, int),
        STLENS_NUM("split", split, double),
        STLENS_NUM("pca", pca, double),
        STLENS_NUM("horizon", horizon, int),
        STLENS_STR("preset", preset),
        STLENS_STR("seasonal", seasonal),
        STLENS_STR("trend", trend),
        STLENS_STR("remainder", remainder),
        STLENS_STR("model", model),
        STLENS_STR("out", out),
        STLENS_NUM("seed", seed, std::uint64_t),
        Key{"decomposition",
            [](RunConfig& c, const std::string& v) {
                if (v == "full") c.decomposition = DecompositionMode::Full;
                else if (v == "causal" || v == "train-only") c.decomposition = DecompositionMode::Causal;
                else fail(ErrorCode::Parse, "config 'decomposition': expected full or causal, got '" + v + "'");
            },
            [](const RunConfig& c) { return std::string(c.decomposition == DecompositionMode::Full ? "full" : "causal"); }},
        Key{"drop_remainder", [](RunConfig& c, const std::string& v) { c.drop_remainder = parse_bool("drop_remainder", v); },
            [](const RunConfig& c) { return show(c.drop_remainder); }},
        Key{"selection",
            [](RunConfig& c, const std::string& v) {
                if (v == "validation") c.selection = Selection::Validation;
                else if (v == "test") c.selection = Selection::Test;
                else fail(ErrorCode::Parse, "config 'selection': expected validation or test, got '" + v + "'");
            },
            [](const RunConfig& c) { return std::string(c.selection == Selection::Test ? "test" : "validation"); }},
        STLENS_NUM("initial_window", initial_window, std::size_t),
        STLENS_NUM("jobs", jobs, unsigned),
        Key{"dm_correction", [](RunConfig& c, const std::string& v) { c.dm_correction = parse_bool("dm_correction", v); },
            [](const RunConfig& c) { return show(c.dm_correction); }},
        STLENS_NUM("stl.seasonal_span", stl.seasonal_span, int),
        STLENS_NUM("stl.trend_span", stl.trend_span, int),
        STLENS_NUM("stl.inner", stl.inner_iterations, int),
        STLENS_NUM("stl.outer", stl.outer_iterations, int),
        STLENS_NUM("synth.n", synth.n, int),
        STLENS_NUM("synth.period", synth.period, int),
        STLENS_NUM("synth.slope", synth.trend_slope, double),
        STLENS_NUM("synth.amplitude", synth.seasonal_amplitude, double),
        STLENS_NUM("synth.noise", synth.noise_std, double),
    };
    return table;
}

#undef STLENS_NUM
#undef STLENS_STR

const Key& find_key(const std::string& name) {
    for (const auto& k : keys()) {
        if (name == k.name) return k;
    }
    fail(ErrorCode::InvalidArgument, "unknown config key '" + name + "'");
}

} // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    find_key(trim(key)).set(*this, trim(value));
}

std::string RunConfig::get(const std::string& key) const {
    return find_key(key).get(*this);
}

void RunConfig::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::Io, "cannot open config file " + path.string());
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        require(eq != std::string::npos, ErrorCode::Parse,
                path.string() + ":" + std::to_string(number) + ": expected key = value");
        try {
            set(line.substr(0, eq), line.substr(eq + 1));
        } catch (const Error& e) {
            throw Error(e.code(), path.string() + ":" + std::to_string(number) + ": " + e.what());
        }
    }
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& k : keys()) out.emplace_back(k.name, k.get(*this));
    return out;
}

std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (const auto& k : keys()) out.emplace_back(k.name);
    return out;
}

PipelineVariant RunConfig::variant() const {
    require(horizon == 1 || horizon == 2, ErrorCode::InvalidArgument, "config 'horizon': must be 1 or 2");
    PipelineVariant v;
    if (!model.empty()) {
        const LearnerSpec spec = parse_spec(model);
        v = PipelineVariant::nondecomposed(std::string(kind_label(spec.kind())), spec);
    } else {
        v = preset_variant(preset.empty() ? (horizon == 1 ? "stl-ensemble-1" : "stl-ensemble-2") : preset);
        const std::array<const std::string*, 3> overrides{&seasonal, &trend, &remainder};
        bool custom = false;
        for (std::size_t i = 0; i < 3; ++i) {
            if (overrides[i]->empty()) continue;
            require(v.mode == PipelineMode::Decomposed, ErrorCode::InvalidArgument,
                    "config: component learners need a decomposed preset");
            v.components[i] = parse_spec(*overrides[i]);
            custom = true;
        }
        if (custom) {
            v.name = "STL-" + std::string(kind_name(v.components[0].kind())) + "/" +
                     std::string(kind_name(v.components[1].kind())) + "/" + std::string(kind_name(v.components[2].kind()));
        }
    }
    v.lag = lag;
    v.pca_threshold = pca;
    v.stl = stl;
    v.stl.period = period;
    v.decomposition = decomposition;
    v.drop_remainder = drop_remainder;
    return v;
}

GridSearchConfig RunConfig::grid() const {
    GridSearchConfig g;
    g.horizon = horizon;
    g.selection = selection;
    g.split_ratio = split;
    g.initial_window = initial_window;
    g.jobs = jobs;
    return g;
}

ComparisonOptions RunConfig::comparison() const {
    ComparisonOptions o;
    o.split_ratio = split;
    o.lag = lag;
    o.pca_threshold = pca;
    o.stl = stl;
    o.stl.period = period;
    o.decomposition = decomposition;
    o.drop_remainder = drop_remainder;
    o.dm.small_sample_correction = dm_correction;
    return o;
}

} // namespace stlens
