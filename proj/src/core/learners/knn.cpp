#include "stlens/learners/knn.hpp"
#include "stlens/error.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace stlens::learners {

KnnModel KnnModel::fit(const KnnParams& params, const Matrix& features, const Vector& targets) {
    require(params.k >= 1, ErrorCode::InvalidArgument, "knn: k must be at least 1");
    require(features.rows() == targets.size(), ErrorCode::DimensionMismatch, "knn: feature/target row mismatch");
    require(features.rows() >= params.k, ErrorCode::InsufficientData,
            "knn: " + std::to_string(features.rows()) + " training rows for k = " + std::to_string(params.k));
    KnnModel m;
    m.k_ = params.k;
    m.features_ = features;
    m.targets_ = targets;
    return m;
}

double KnnModel::predict_row(const Vector& row) const {
    require(row.size() == features_.cols(), ErrorCode::DimensionMismatch, "knn: feature dimension mismatch");
    const auto n = static_cast<std::size_t>(features_.rows());
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        dist[i] = (features_.row(static_cast<Eigen::Index>(i)).transpose() - row).squaredNorm();
    }
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    const auto k = static_cast<std::size_t>(k_);
    std::partial_sort(idx.begin(), idx.begin() + static_cast<long>(k), idx.end(), [&](std::size_t a, std::size_t b) {
        return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
    });
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        sum += targets_(static_cast<Eigen::Index>(idx[i]));
    }
    return sum / static_cast<double>(k);
}

Vector KnnModel::predict(const Matrix& features) const {
    Vector out(features.rows());
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        out(i) = predict_row(features.row(i).transpose());
    }
    return out;
}

} // namespace stlens::learners
