#pragma once

#include "stlens/types.hpp"

#include <cstdint>
#include <vector>

namespace stlens::learners {

struct MlpParams {
    int hidden_units = 5;
    int epochs = 2000;
    double learning_rate = 0.01;
    std::uint64_t seed = 1;
};

/// Weights of a single-hidden-layer network with logistic hidden units and
/// a linear output.
struct MlpWeights {
    Matrix hidden;        // hidden_units x inputs
    Vector hidden_bias;   // hidden_units
    Vector output;        // hidden_units
    double output_bias = 0.0;

    static MlpWeights zeros(int inputs, int hidden_units);
    Eigen::Index parameter_count() const;
    Vector flatten() const;
    static MlpWeights unflatten(const Vector& flat, int inputs, int hidden_units);

    double forward(const Eigen::Ref<const Vector>& x) const;
};

/// Half mean squared error of `weights` on (X, y) and its analytic gradient
/// in flattened parameter order.
double mlp_loss_and_gradient(const MlpWeights& weights, const Matrix& features, const Vector& targets, Vector* gradient);

class MlpModel {
public:
    static MlpModel fit(const MlpParams& params, const Matrix& features, const Vector& targets);
    /// Network operating directly on raw inputs and outputs.
    static MlpModel from_weights(MlpWeights weights);

    Vector predict(const Matrix& features) const;
    double predict_row(const Vector& row) const;

    const MlpWeights& weights() const noexcept { return weights_; }
    const std::vector<double>& training_loss() const noexcept { return training_loss_; }

private:
    MlpWeights weights_;
    Vector x_mean_;
    Vector x_scale_;
    double y_mean_ = 0.0;
    double y_scale_ = 1.0;
    std::vector<double> training_loss_;
};

} // namespace stlens::learners
