#pragma once

#include "stlens/learners/cubist.hpp"
#include "stlens/learners/glmboost.hpp"
#include "stlens/learners/knn.hpp"
#include "stlens/learners/mars.hpp"
#include "stlens/learners/mlp.hpp"
#include "stlens/learners/svr.hpp"
#include "stlens/types.hpp"

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <variant>

namespace stlens {

// Enumeration order is the tie-break order used by grid search.
enum class LearnerKind { Knn, Mars, Svr, GlmBoost, Cubist, Mlp };

inline constexpr std::array<LearnerKind, 6> kAllLearnerKinds{
    LearnerKind::Knn, LearnerKind::Mars, LearnerKind::Svr, LearnerKind::GlmBoost, LearnerKind::Cubist, LearnerKind::Mlp};

/// Lower-case identifier: knn, mars, svr, glmboost, cubist, mlp.
std::string_view kind_name(LearnerKind kind);
/// Display label used in reports: k-NN, MARS, SVR, GLMBoost, CUBIST, MLP.
std::string_view kind_label(LearnerKind kind);
LearnerKind parse_kind(std::string_view text);

using LearnerParams = std::variant<learners::KnnParams, learners::MarsParams, learners::SvrParams,
                                   learners::GlmBoostParams, learners::CubistParams, learners::MlpParams>;

struct LearnerSpec {
    LearnerParams params;

    LearnerKind kind() const noexcept { return static_cast<LearnerKind>(params.index()); }
    /// Throws Error(InvalidArgument) when a hyperparameter is out of range.
    void validate() const;
    /// `kind key=value ...`, the inverse of parse_spec.
    std::string to_string() const;
};

/// Default hyperparameters of a kind.
LearnerSpec default_spec(LearnerKind kind);

/// Hyperparameter presets for a learner trained on one series role.
enum class Role { Seasonal, Trend, Remainder, Nondecomposed };
std::string_view role_name(Role role);
LearnerSpec role_preset(LearnerKind kind, Role role);

/// Parses `kind [preset] [key=value ...]`, e.g. `svr seasonal`,
/// `mars max_terms=5 degree=2`. Presets are applied before key overrides.
LearnerSpec parse_spec(std::string_view text);
/// Applies `key=value` hyperparameter overrides in place.
void apply_overrides(LearnerSpec& spec, const std::map<std::string, std::string>& overrides);

using ModelVariant = std::variant<learners::KnnModel, learners::MarsModel, learners::SvrModel,
                                  learners::GlmBoostModel, learners::CubistModel, learners::MlpModel>;

/// A trained learner; immutable, prediction is a pure function of the model.
class FittedModel {
public:
    FittedModel(LearnerSpec spec, ModelVariant model, Eigen::Index dimension)
        : spec_(std::move(spec)), model_(std::move(model)), dimension_(dimension) {}

    Vector predict(const Matrix& features) const;
    double predict_row(const Vector& row) const;

    const LearnerSpec& spec() const noexcept { return spec_; }
    const ModelVariant& model() const noexcept { return model_; }
    Eigen::Index dimension() const noexcept { return dimension_; }

private:
    LearnerSpec spec_;
    ModelVariant model_;
    Eigen::Index dimension_;
};

FittedModel fit(const LearnerSpec& spec, const Matrix& features, const Vector& targets);

} // namespace stlens
