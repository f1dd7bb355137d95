#include "stlens/learner.hpp"
#include "stlens/error.hpp"
#include "stlens/series.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace stlens {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

int to_int(const std::string& key, const std::string& text) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    require(ec == std::errc{} && ptr == text.data() + text.size(), ErrorCode::Parse,
            "hyperparameter '" + key + "': expected an integer, got '" + text + "'");
    return v;
}

double to_real(const std::string& key, const std::string& text) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    require(ec == std::errc{} && ptr == text.data() + text.size() && std::isfinite(v), ErrorCode::Parse,
            "hyperparameter '" + key + "': expected a number, got '" + text + "'");
    return v;
}

[[noreturn]] void unknown_key(LearnerKind kind, const std::string& key) {
    fail(ErrorCode::InvalidArgument, "unknown hyperparameter '" + key + "' for " + std::string(kind_name(kind)));
}

} // namespace

std::string_view kind_name(LearnerKind kind) {
    switch (kind) {
    case LearnerKind::Knn: return "knn";
    case LearnerKind::Mars: return "mars";
    case LearnerKind::Svr: return "svr";
    case LearnerKind::GlmBoost: return "glmboost";
    case LearnerKind::Cubist: return "cubist";
    case LearnerKind::Mlp: return "mlp";
    }
    return "?";
}

std::string_view kind_label(LearnerKind kind) {
    switch (kind) {
    case LearnerKind::Knn: return "k-NN";
    case LearnerKind::Mars: return "MARS";
    case LearnerKind::Svr: return "SVR";
    case LearnerKind::GlmBoost: return "GLMBoost";
    case LearnerKind::Cubist: return "CUBIST";
    case LearnerKind::Mlp: return "MLP";
    }
    return "?";
}

LearnerKind parse_kind(std::string_view text) {
    std::string lower(text);
    for (auto& c : lower) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (lower == "k-nn") lower = "knn";
    for (auto kind : kAllLearnerKinds) {
        if (kind_name(kind) == lower) {
            return kind;
        }
    }
    fail(ErrorCode::InvalidArgument, "unknown learner kind '" + std::string(text) + "'");
}

std::string_view role_name(Role role) {
    switch (role) {
    case Role::Seasonal: return "seasonal";
    case Role::Trend: return "trend";
    case Role::Remainder: return "remainder";
    case Role::Nondecomposed: return "nondecomposed";
    }
    return "?";
}

void LearnerSpec::validate() const {
    std::visit(overloaded{
                   [](const learners::KnnParams& p) {
                       require(p.k >= 1, ErrorCode::InvalidArgument, "knn: k must be at least 1");
                   },
                   [](const learners::MarsParams& p) {
                       require(p.max_terms >= 1, ErrorCode::InvalidArgument, "mars: max_terms must be at least 1");
                       require(p.degree == 1 || p.degree == 2, ErrorCode::InvalidArgument, "mars: degree must be 1 or 2");
                       require(p.gcv_penalty >= 0.0, ErrorCode::InvalidArgument, "mars: gcv_penalty must be nonnegative");
                   },
                   [](const learners::SvrParams& p) {
                       require(p.sigma > 0.0 && p.cost > 0.0, ErrorCode::InvalidArgument, "svr: sigma and cost must be positive");
                       require(p.epsilon >= 0.0 && p.tolerance > 0.0 && p.max_iterations >= 1, ErrorCode::InvalidArgument,
                               "svr: invalid epsilon, tolerance or iteration cap");
                   },
                   [](const learners::GlmBoostParams& p) {
                       require(p.iterations >= 1, ErrorCode::InvalidArgument, "glmboost: iterations must be at least 1");
                       require(p.step_length > 0.0 && p.step_length <= 1.0, ErrorCode::InvalidArgument,
                               "glmboost: step_length must lie in (0, 1]");
                   },
                   [](const learners::CubistParams& p) {
                       require(p.committees >= 1, ErrorCode::InvalidArgument, "cubist: committees must be at least 1");
                       require(p.instances >= 0, ErrorCode::InvalidArgument, "cubist: instances must be nonnegative");
                       require(p.min_leaf >= 2 && p.max_depth >= 0, ErrorCode::InvalidArgument, "cubist: invalid tree controls");
                   },
                   [](const learners::MlpParams& p) {
                       require(p.hidden_units >= 1 && p.epochs >= 1, ErrorCode::InvalidArgument,
                               "mlp: hidden_units and epochs must be at least 1");
                       require(p.learning_rate > 0.0, ErrorCode::InvalidArgument, "mlp: learning_rate must be positive");
                   },
               },
               params);
}

std::string LearnerSpec::to_string() const {
    std::ostringstream os;
    os << kind_name(kind());
    std::visit(overloaded{
                   [&](const learners::KnnParams& p) { os << " k=" << p.k; },
                   [&](const learners::MarsParams& p) {
                       os << " max_terms=" << p.max_terms << " degree=" << p.degree << " gcv_penalty=" << format_double(p.gcv_penalty);
                   },
                   [&](const learners::SvrParams& p) {
                       os << " sigma=" << format_double(p.sigma) << " cost=" << format_double(p.cost)
                          << " epsilon=" << format_double(p.epsilon) << " tolerance=" << format_double(p.tolerance)
                          << " max_iterations=" << p.max_iterations;
                   },
                   [&](const learners::GlmBoostParams& p) {
                       os << " iterations=" << p.iterations << " step_length=" << format_double(p.step_length);
                   },
                   [&](const learners::CubistParams& p) {
                       os << " committees=" << p.committees << " instances=" << p.instances << " min_leaf=" << p.min_leaf
                          << " max_depth=" << p.max_depth;
                   },
                   [&](const learners::MlpParams& p) {
                       os << " hidden_units=" << p.hidden_units << " epochs=" << p.epochs
                          << " learning_rate=" << format_double(p.learning_rate) << " seed=" << p.seed;
                   },
               },
               params);
    return os.str();
}

LearnerSpec default_spec(LearnerKind kind) {
    switch (kind) {
    case LearnerKind::Knn: return {learners::KnnParams{}};
    case LearnerKind::Mars: return {learners::MarsParams{}};
    case LearnerKind::Svr: return {learners::SvrParams{}};
    case LearnerKind::GlmBoost: return {learners::GlmBoostParams{}};
    case LearnerKind::Cubist: return {learners::CubistParams{}};
    case LearnerKind::Mlp: return {learners::MlpParams{}};
    }
    fail(ErrorCode::InvalidArgument, "unknown learner kind");
}

LearnerSpec role_preset(LearnerKind kind, Role role) {
    const auto r = static_cast<std::size_t>(role);
    switch (kind) {
    case LearnerKind::Knn: {
        constexpr std::array<int, 4> k{9, 5, 11, 7};
        return {learners::KnnParams{k[r]}};
    }
    case LearnerKind::Mars: {
        constexpr std::array<int, 4> terms{9, 3, 9, 2};
        learners::MarsParams p;
        p.max_terms = terms[r];
        p.degree = 1;
        return {p};
    }
    case LearnerKind::Svr: {
        constexpr std::array<double, 4> sigma{0.0996, 0.9212, 0.0881, 0.2105};
        constexpr std::array<double, 4> cost{4.0, 2.0, 0.25, 2.0};
        learners::SvrParams p;
        p.sigma = sigma[r];
        p.cost = cost[r];
        p.epsilon = 0.1;
        return {p};
    }
    case LearnerKind::GlmBoost: {
        constexpr std::array<int, 4> iterations{250, 50, 100, 250};
        return {learners::GlmBoostParams{iterations[r], 0.1}};
    }
    case LearnerKind::Cubist: {
        constexpr std::array<int, 4> committees{1, 1, 1, 10};
        constexpr std::array<int, 4> instances{5, 5, 0, 0};
        learners::CubistParams p;
        p.committees = committees[r];
        p.instances = instances[r];
        return {p};
    }
    case LearnerKind::Mlp: {
        constexpr std::array<int, 4> hidden{9, 9, 1, 1};
        learners::MlpParams p;
        p.hidden_units = hidden[r];
        p.epochs = 2000;
        p.learning_rate = 0.01;
        return {p};
    }
    }
    fail(ErrorCode::InvalidArgument, "unknown learner kind");
}

void apply_overrides(LearnerSpec& spec, const std::map<std::string, std::string>& overrides) {
    const LearnerKind kind = spec.kind();
    for (const auto& [key, value] : overrides) {
        std::visit(overloaded{
                       [&](learners::KnnParams& p) {
                           if (key == "k") p.k = to_int(key, value);
                           else unknown_key(kind, key);
                       },
                       [&](learners::MarsParams& p) {
                           if (key == "max_terms") p.max_terms = to_int(key, value);
                           else if (key == "degree") p.degree = to_int(key, value);
                           else if (key == "gcv_penalty") p.gcv_penalty = to_real(key, value);
                           else unknown_key(kind, key);
                       },
                       [&](learners::SvrParams& p) {
                           if (key == "sigma") p.sigma = to_real(key, value);
                           else if (key == "cost") p.cost = to_real(key, value);
                           else if (key == "epsilon") p.epsilon = to_real(key, value);
                           else if (key == "tolerance") p.tolerance = to_real(key, value);
                           else if (key == "max_iterations") p.max_iterations = to_int(key, value);
                           else unknown_key(kind, key);
                       },
                       [&](learners::GlmBoostParams& p) {
                           if (key == "iterations") p.iterations = to_int(key, value);
                           else if (key == "step_length") p.step_length = to_real(key, value);
                           else unknown_key(kind, key);
                       },
                       [&](learners::CubistParams& p) {
                           if (key == "committees") p.committees = to_int(key, value);
                           else if (key == "instances") p.instances = to_int(key, value);
                           else if (key == "min_leaf") p.min_leaf = to_int(key, value);
                           else if (key == "max_depth") p.max_depth = to_int(key, value);
                           else unknown_key(kind, key);
                       },
                       [&](learners::MlpParams& p) {
                           if (key == "hidden_units") p.hidden_units = to_int(key, value);
                           else if (key == "epochs") p.epochs = to_int(key, value);
                           else if (key == "learning_rate") p.learning_rate = to_real(key, value);
                           else if (key == "seed") p.seed = static_cast<std::uint64_t>(to_int(key, value));
                           else unknown_key(kind, key);
                       },
                   },
                   spec.params);
    }
    spec.validate();
}

LearnerSpec parse_spec(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string token;
    require(static_cast<bool>(in >> token), ErrorCode::Parse, "empty learner specification");
    LearnerSpec spec = default_spec(parse_kind(token));
    std::map<std::string, std::string> overrides;
    while (in >> token) {
        auto eq = token.find('=');
        if (eq == std::string::npos) {
            static const std::array<std::pair<std::string_view, Role>, 4> presets{{
                {"seasonal", Role::Seasonal},
                {"trend", Role::Trend},
                {"remainder", Role::Remainder},
                {"nondecomposed", Role::Nondecomposed},
            }};
            bool found = false;
            for (const auto& [name, role] : presets) {
                if (token == name) {
                    spec = role_preset(spec.kind(), role);
                    found = true;
                }
            }
            require(found, ErrorCode::Parse, "unknown preset '" + token + "'");
        } else {
            overrides[token.substr(0, eq)] = token.substr(eq + 1);
        }
    }
    apply_overrides(spec, overrides);
    return spec;
}

Vector FittedModel::predict(const Matrix& features) const {
    require(features.cols() == dimension_, ErrorCode::DimensionMismatch,
            "predict: expected " + std::to_string(dimension_) + " features, got " + std::to_string(features.cols()));
    return std::visit([&](const auto& m) { return m.predict(features); }, model_);
}

double FittedModel::predict_row(const Vector& row) const {
    require(row.size() == dimension_, ErrorCode::DimensionMismatch,
            "predict: expected " + std::to_string(dimension_) + " features, got " + std::to_string(row.size()));
    return std::visit([&](const auto& m) { return m.predict_row(row); }, model_);
}

FittedModel fit(const LearnerSpec& spec, const Matrix& features, const Vector& targets) {
    spec.validate();
    require(features.rows() == targets.size(), ErrorCode::DimensionMismatch, "fit: feature/target row mismatch");
    require(features.allFinite() && targets.allFinite(), ErrorCode::InvalidArgument, "fit: non-finite training data");
    ModelVariant model = std::visit(
        overloaded{
            [&](const learners::KnnParams& p) -> ModelVariant { return learners::KnnModel::fit(p, features, targets); },
            [&](const learners::MarsParams& p) -> ModelVariant { return learners::MarsModel::fit(p, features, targets); },
            [&](const learners::SvrParams& p) -> ModelVariant { return learners::SvrModel::fit(p, features, targets); },
            [&](const learners::GlmBoostParams& p) -> ModelVariant { return learners::GlmBoostModel::fit(p, features, targets); },
            [&](const learners::CubistParams& p) -> ModelVariant { return learners::CubistModel::fit(p, features, targets); },
            [&](const learners::MlpParams& p) -> ModelVariant { return learners::MlpModel::fit(p, features, targets); },
        },
        spec.params);
    return FittedModel(spec, std::move(model), features.cols());
}

} // namespace stlens
