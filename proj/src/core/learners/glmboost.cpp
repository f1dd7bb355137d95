#include "stlens/learners/glmboost.hpp"
#include "stlens/error.hpp"

namespace stlens::learners {

BoostStep boost_step(const Vector& coefficients, const Vector& residuals, const Matrix& features, double step_length) {
    require(features.cols() == coefficients.size() && features.rows() == residuals.size(), ErrorCode::DimensionMismatch,
            "boost step: dimension mismatch");
    require(step_length > 0.0, ErrorCode::InvalidArgument, "boost step: step length must be positive");
    require(features.cwiseAbs().maxCoeff() > 0.0, ErrorCode::Degenerate, "boost step: all-zero feature matrix");

    BoostStep step{coefficients, residuals, -1};
    double best_reduction = 0.0;
    double best_coef = 0.0;
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
        const double ss = features.col(j).squaredNorm();
        if (!(ss > 0.0)) {
            continue;
        }
        const double xr = features.col(j).dot(residuals);
        const double reduction = xr * xr / ss;
        if (reduction > best_reduction) {
            best_reduction = reduction;
            best_coef = xr / ss;
            step.selected = static_cast<int>(j);
        }
    }
    if (step.selected >= 0) {
        step.coefficients(step.selected) += step_length * best_coef;
        step.residuals -= (step_length * best_coef) * features.col(step.selected);
    }
    return step;
}

GlmBoostModel GlmBoostModel::fit(const GlmBoostParams& params, const Matrix& features, const Vector& targets) {
    require(params.iterations >= 1, ErrorCode::InvalidArgument, "glmboost: iterations must be at least 1");
    require(params.step_length > 0.0 && params.step_length <= 1.0, ErrorCode::InvalidArgument,
            "glmboost: step length must lie in (0, 1]");
    require(features.rows() == targets.size(), ErrorCode::DimensionMismatch, "glmboost: feature/target row mismatch");
    require(features.rows() >= 2, ErrorCode::InsufficientData, "glmboost: needs at least two training rows");

    GlmBoostModel model;
    model.feature_means_ = features.colwise().mean().transpose();
    const Matrix centered = features.rowwise() - model.feature_means_.transpose();
    model.intercept_ = targets.mean();
    Vector residuals = targets.array() - model.intercept_;
    Vector coef = Vector::Zero(features.cols());
    const auto n = static_cast<double>(features.rows());
    model.training_mse_.push_back(residuals.squaredNorm() / n);
    for (int it = 0; it < params.iterations; ++it) {
        auto step = boost_step(coef, residuals, centered, params.step_length);
        coef = std::move(step.coefficients);
        residuals = std::move(step.residuals);
        model.training_mse_.push_back(residuals.squaredNorm() / n);
    }
    model.coefficients_ = std::move(coef);
    return model;
}

double GlmBoostModel::predict_row(const Vector& row) const {
    require(row.size() == coefficients_.size(), ErrorCode::DimensionMismatch, "glmboost: feature dimension mismatch");
    return intercept_ + coefficients_.dot(row - feature_means_);
}

Vector GlmBoostModel::predict(const Matrix& features) const {
    require(features.cols() == coefficients_.size(), ErrorCode::DimensionMismatch, "glmboost: feature dimension mismatch");
    return ((features.rowwise() - feature_means_.transpose()) * coefficients_).array() + intercept_;
}

} // namespace stlens::learners
