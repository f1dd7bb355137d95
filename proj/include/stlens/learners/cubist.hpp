#pragma once

#include "stlens/types.hpp"

#include <vector>

namespace stlens::learners {

struct CubistParams {
    int committees = 1;
    int instances = 0;
    int min_leaf = 8;
    int max_depth = 3;
};

struct RuleCondition {
    int variable = 0;
    double threshold = 0.0;
    bool less_equal = true; // x[variable] <= threshold, otherwise >
};

/// Root-to-leaf path of a model tree with the linear model fit at the leaf.
struct Rule {
    std::vector<RuleCondition> conditions;
    std::vector<int> variables; // regressors of the leaf model
    double intercept = 0.0;
    Vector coefficients;        // aligned with `variables`

    bool covers(const Eigen::Ref<const Vector>& row) const;
    double evaluate(const Eigen::Ref<const Vector>& row) const;
};

/// Simplified Cubist: a committee of variance-reduction model trees whose
/// leaves carry linear models over the split variables on their path, read
/// as disjoint rules. Committee members after the first are trained on the
/// adjusted targets 2y - previous prediction. Optional instance-based
/// correction adds the mean residual of the nearest training neighbours.
/// No rule simplification or smoothing is performed.
class CubistModel {
public:
    static CubistModel fit(const CubistParams& params, const Matrix& features, const Vector& targets);

    Vector predict(const Matrix& features) const;
    double predict_row(const Vector& row) const;
    /// Committee average without the instance correction.
    double rule_prediction(const Eigen::Ref<const Vector>& row) const;

    const std::vector<std::vector<Rule>>& committees() const noexcept { return committees_; }

private:
    CubistParams params_;
    std::vector<std::vector<Rule>> committees_;
    Matrix features_;
    Vector residuals_; // target - rule prediction per training row
    Eigen::Index dimension_ = 0;
};

} // namespace stlens::learners
