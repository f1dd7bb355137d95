#pragma once

#include "stlens/types.hpp"

#include <vector>

namespace stlens::learners {

struct GlmBoostParams {
    int iterations = 100;
    double step_length = 0.1;
};

struct BoostStep {
    Vector coefficients;
    Vector residuals;
    int selected = -1; // -1 when no feature reduces the loss
};

/// One componentwise least-squares boosting step on centered features.
BoostStep boost_step(const Vector& coefficients, const Vector& residuals, const Matrix& features, double step_length);

/// Componentwise linear least-squares boosting with shrinkage.
class GlmBoostModel {
public:
    static GlmBoostModel fit(const GlmBoostParams& params, const Matrix& features, const Vector& targets);

    Vector predict(const Matrix& features) const;
    double predict_row(const Vector& row) const;

    double intercept() const noexcept { return intercept_; }
    /// Coefficients on centered features.
    const Vector& coefficients() const noexcept { return coefficients_; }
    const Vector& feature_means() const noexcept { return feature_means_; }
    /// Training MSE before the first step and after every step.
    const std::vector<double>& training_mse() const noexcept { return training_mse_; }

private:
    double intercept_ = 0.0;
    Vector coefficients_;
    Vector feature_means_;
    std::vector<double> training_mse_;
};

} // namespace stlens::learners
