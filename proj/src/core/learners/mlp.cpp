#include "stlens/learners/mlp.hpp"
#include "stlens/error.hpp"

#include <cmath>
#include <random>

namespace stlens::learners {

namespace {

Matrix logistic(const Matrix& a) {
    return (1.0 + (-a.array()).exp()).inverse().matrix();
}

// Uniform draw in [-0.5, 0.5) from the top 53 bits, identical on every platform.
double centered_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
}

} // namespace

MlpWeights MlpWeights::zeros(int inputs, int hidden_units) {
    MlpWeights w;
    w.hidden = Matrix::Zero(hidden_units, inputs);
    w.hidden_bias = Vector::Zero(hidden_units);
    w.output = Vector::Zero(hidden_units);
    w.output_bias = 0.0;
    return w;
}

Eigen::Index MlpWeights::parameter_count() const {
    return hidden.size() + hidden_bias.size() + output.size() + 1;
}

Vector MlpWeights::flatten() const {
    Vector flat(parameter_count());
    Eigen::Index o = 0;
    flat.segment(o, hidden.size()) = Eigen::Map<const Vector>(hidden.data(), hidden.size());
    o += hidden.size();
    flat.segment(o, hidden_bias.size()) = hidden_bias;
    o += hidden_bias.size();
    flat.segment(o, output.size()) = output;
    o += output.size();
    flat(o) = output_bias;
    return flat;
}

MlpWeights MlpWeights::unflatten(const Vector& flat, int inputs, int hidden_units) {
    MlpWeights w = zeros(inputs, hidden_units);
    require(flat.size() == w.parameter_count(), ErrorCode::DimensionMismatch, "mlp: parameter vector has the wrong length");
    Eigen::Index o = 0;
    w.hidden = Eigen::Map<const Matrix>(flat.data(), hidden_units, inputs);
    o += w.hidden.size();
    w.hidden_bias = flat.segment(o, hidden_units);
    o += hidden_units;
    w.output = flat.segment(o, hidden_units);
    o += hidden_units;
    w.output_bias = flat(o);
    return w;
}

double MlpWeights::forward(const Eigen::Ref<const Vector>& x) const {
    const Vector a = hidden * x + hidden_bias;
    const Vector s = (1.0 + (-a.array()).exp()).inverse().matrix();
    return output.dot(s) + output_bias;
}

double mlp_loss_and_gradient(const MlpWeights& w, const Matrix& x, const Vector& y, Vector* gradient) {
    require(x.cols() == w.hidden.cols() && x.rows() == y.size(), ErrorCode::DimensionMismatch, "mlp: dimension mismatch");
    const auto n = static_cast<double>(x.rows());
    const Matrix a = (x * w.hidden.transpose()).rowwise() + w.hidden_bias.transpose();
    const Matrix s = logistic(a);
    const Vector f = (s * w.output).array() + w.output_bias;
    const Vector e = f - y;
    const double loss = 0.5 * e.squaredNorm() / n;
    if (gradient != nullptr) {
        const Matrix delta = ((e * w.output.transpose()).array() * s.array() * (1.0 - s.array())).matrix();
        MlpWeights g = MlpWeights::zeros(static_cast<int>(x.cols()), static_cast<int>(w.output.size()));
        g.hidden = delta.transpose() * x / n;
        g.hidden_bias = delta.colwise().sum().transpose() / n;
        g.output = s.transpose() * e / n;
        g.output_bias = e.sum() / n;
        *gradient = g.flatten();
    }
    return loss;
}

MlpModel MlpModel::fit(const MlpParams& params, const Matrix& features, const Vector& targets) {
    require(params.hidden_units >= 1 && params.epochs >= 1, ErrorCode::InvalidArgument, "mlp: hidden units and epochs must be positive");
    require(params.learning_rate > 0.0, ErrorCode::InvalidArgument, "mlp: learning rate must be positive");
    require(features.rows() == targets.size(), ErrorCode::DimensionMismatch, "mlp: feature/target row mismatch");
    require(features.rows() >= 2, ErrorCode::InsufficientData, "mlp: needs at least two training rows");

    MlpModel model;
    const auto n = static_cast<double>(features.rows());
    model.x_mean_ = features.colwise().mean().transpose();
    model.x_scale_.resize(features.cols());
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
        const double sd = std::sqrt((features.col(j).array() - model.x_mean_(j)).square().sum() / (n - 1.0));
        model.x_scale_(j) = sd > 0.0 ? sd : 1.0;
    }
    model.y_mean_ = targets.mean();
    const double ysd = std::sqrt((targets.array() - model.y_mean_).square().sum() / (n - 1.0));
    model.y_scale_ = ysd > 0.0 ? ysd : 1.0;

    const Matrix x = (features.rowwise() - model.x_mean_.transpose()).array().rowwise() / model.x_scale_.transpose().array();
    const Vector y = (targets.array() - model.y_mean_) / model.y_scale_;

    std::mt19937_64 rng(params.seed);
    Vector theta(MlpWeights::zeros(static_cast<int>(features.cols()), params.hidden_units).parameter_count());
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        theta(i) = centered_uniform(rng);
    }
    const int p = static_cast<int>(features.cols());
    Vector grad;
    model.training_loss_.reserve(static_cast<std::size_t>(params.epochs));
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        const auto w = MlpWeights::unflatten(theta, p, params.hidden_units);
        model.training_loss_.push_back(mlp_loss_and_gradient(w, x, y, &grad));
        theta -= params.learning_rate * grad;
    }
    model.weights_ = MlpWeights::unflatten(theta, p, params.hidden_units);
    return model;
}

MlpModel MlpModel::from_weights(MlpWeights weights) {
    MlpModel model;
    model.x_mean_ = Vector::Zero(weights.hidden.cols());
    model.x_scale_ = Vector::Ones(weights.hidden.cols());
    model.weights_ = std::move(weights);
    return model;
}

double MlpModel::predict_row(const Vector& row) const {
    require(row.size() == x_mean_.size(), ErrorCode::DimensionMismatch, "mlp: feature dimension mismatch");
    const Vector x = (row - x_mean_).cwiseQuotient(x_scale_);
    return y_mean_ + y_scale_ * weights_.forward(x);
}

Vector MlpModel::predict(const Matrix& features) const {
    Vector out(features.rows());
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        out(i) = predict_row(features.row(i).transpose());
    }
    return out;
}

} // namespace stlens::learners
