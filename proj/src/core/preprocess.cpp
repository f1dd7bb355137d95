#include "stlens/preprocess.hpp"
#include "stlens/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace stlens {

Standardizer Standardizer::fit(const Matrix& train_features) {
    require(train_features.rows() >= 2 && train_features.cols() >= 1, ErrorCode::InsufficientData,
            "standardizer needs at least two training rows");
    Standardizer s;
    const auto n = static_cast<double>(train_features.rows());
    s.means_ = train_features.colwise().mean().transpose();
    s.stds_.resize(train_features.cols());
    for (Eigen::Index j = 0; j < train_features.cols(); ++j) {
        const double ss = (train_features.col(j).array() - s.means_(j)).square().sum();
        const double sd = std::sqrt(ss / (n - 1.0));
        s.stds_(j) = sd > 1e-12 * std::max(1.0, std::abs(s.means_(j))) ? sd : 1.0;
    }
    return s;
}

Matrix Standardizer::apply(const Matrix& features) const {
    require(features.cols() == means_.size(), ErrorCode::DimensionMismatch, "standardizer: column count mismatch");
    return (features.rowwise() - means_.transpose()).array().rowwise() / stds_.transpose().array();
}

Vector Standardizer::apply_row(const Vector& row) const {
    require(row.size() == means_.size(), ErrorCode::DimensionMismatch, "standardizer: column count mismatch");
    return (row - means_).cwiseQuotient(stds_);
}

PcaModel PcaModel::fit(const Matrix& train_features, double threshold) {
    require(threshold > 0.0 && threshold <= 1.0, ErrorCode::InvalidArgument, "pca: threshold must lie in (0, 1]");
    require(train_features.rows() >= 2 && train_features.cols() >= 1, ErrorCode::InsufficientData,
            "pca: needs at least two rows");
    PcaModel model;
    model.threshold_ = threshold;
    model.center_ = train_features.colwise().mean().transpose();
    const Matrix centered = train_features.rowwise() - model.center_.transpose();
    const Matrix cov = (centered.transpose() * centered) / static_cast<double>(train_features.rows() - 1);

    Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
    require(solver.info() == Eigen::Success, ErrorCode::Degenerate, "pca: eigendecomposition failed");
    const Vector& evals = solver.eigenvalues();
    const Matrix& evecs = solver.eigenvectors();

    const auto p = evals.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return evals(a) > evals(b); });

    double total = 0.0;
    for (Eigen::Index i = 0; i < p; ++i) {
        total += std::max(evals(i), 0.0);
    }
    require(total > 0.0, ErrorCode::Degenerate, "pca: features have zero total variance");
    const double largest = std::max(evals(order.front()), 0.0);

    model.all_ratios_.reserve(static_cast<std::size_t>(p));
    std::size_t positive = 0;
    for (auto idx : order) {
        const double lambda = std::max(evals(idx), 0.0);
        model.all_ratios_.push_back(lambda / total);
        if (lambda > 1e-12 * largest) {
            ++positive;
        }
    }

    std::size_t k = 0;
    double cumulative = 0.0;
    while (k < positive) {
        cumulative += model.all_ratios_[k];
        ++k;
        if (cumulative >= threshold - 1e-12) {
            break;
        }
    }

    model.components_.resize(p, static_cast<Eigen::Index>(k));
    for (std::size_t c = 0; c < k; ++c) {
        Vector v = evecs.col(order[c]);
        Eigen::Index arg = 0;
        for (Eigen::Index i = 1; i < v.size(); ++i) {
            if (std::abs(v(i)) > std::abs(v(arg)) + 1e-12) {
                arg = i;
            }
        }
        if (v(arg) < 0.0) {
            v = -v;
        }
        model.components_.col(static_cast<Eigen::Index>(c)) = v;
    }
    return model;
}

Matrix PcaModel::transform(const Matrix& features) const {
    require(features.cols() == components_.rows(), ErrorCode::DimensionMismatch, "pca: feature dimension mismatch");
    return (features.rowwise() - center_.transpose()) * components_;
}

Vector PcaModel::transform_row(const Vector& row) const {
    require(row.size() == components_.rows(), ErrorCode::DimensionMismatch, "pca: feature dimension mismatch");
    return components_.transpose() * (row - center_);
}

Matrix PcaModel::inverse_transform(const Matrix& scores) const {
    require(scores.cols() == components_.cols(), ErrorCode::DimensionMismatch, "pca: score dimension mismatch");
    return (scores * components_.transpose()).rowwise() + center_.transpose();
}

std::vector<double> PcaModel::explained_variance_ratio() const {
    return {all_ratios_.begin(), all_ratios_.begin() + static_cast<long>(kept())};
}

double PcaModel::cumulative_ratio() const {
    auto r = explained_variance_ratio();
    return std::accumulate(r.begin(), r.end(), 0.0);
}

std::vector<TimeSlice> time_slices(std::size_t n_rows, const TimeSliceConfig& config) {
    require(config.initial_window >= 1 && config.horizon >= 1, ErrorCode::InvalidArgument,
            "time slices: initial window and horizon must be positive");
    require(config.initial_window + config.horizon <= n_rows, ErrorCode::InsufficientData,
            "time slices: initial window " + std::to_string(config.initial_window) + " plus horizon " +
                std::to_string(config.horizon) + " exceeds " + std::to_string(n_rows) + " rows");
    std::vector<TimeSlice> slices;
    for (std::size_t end = config.initial_window; end + config.horizon <= n_rows; ++end) {
        TimeSlice s;
        const std::size_t begin = config.growing ? 0 : end - config.initial_window;
        for (std::size_t i = begin; i < end; ++i) s.train.push_back(i);
        for (std::size_t i = end; i < end + config.horizon; ++i) s.validation.push_back(i);
        slices.push_back(std::move(s));
    }
    return slices;
}

} // namespace stlens
