#pragma once

#include "stlens/types.hpp"

namespace stlens::learners {

/// exp(-sigma * ||a - b||^2).
double rbf_kernel(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b, double sigma);

struct SvrParams {
    double sigma = 0.1;
    double cost = 1.0;
    double epsilon = 0.1; // on standardized targets
    double tolerance = 1e-3;
    long max_iterations = 100000;
};

/// Epsilon-insensitive support vector regression with an RBF kernel, solved
/// in the dual by SMO with second-order working-set selection. Targets are
/// standardized internally.
class SvrModel {
public:
    static SvrModel fit(const SvrParams& params, const Matrix& features, const Vector& targets);

    Vector predict(const Matrix& features) const;
    double predict_row(const Vector& row) const;

    /// beta_i = alpha_i - alpha_i^*, in standardized-target units, within [-cost, cost].
    const Vector& dual_coefficients() const noexcept { return dual_; }
    double bias() const noexcept { return bias_; }
    /// Maximal KKT violation m(alpha) - M(alpha) at termination.
    double kkt_violation() const noexcept { return kkt_violation_; }
    long iterations() const noexcept { return iterations_; }
    double target_mean() const noexcept { return y_mean_; }
    double target_scale() const noexcept { return y_scale_; }
    const SvrParams& params() const noexcept { return params_; }

private:
    SvrParams params_;
    Matrix support_;
    Vector dual_;
    double bias_ = 0.0;
    double y_mean_ = 0.0;
    double y_scale_ = 1.0;
    double kkt_violation_ = 0.0;
    long iterations_ = 0;
};

} // namespace stlens::learners
