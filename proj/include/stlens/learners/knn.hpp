#pragma once

#include "stlens/types.hpp"

namespace stlens::learners {

struct KnnParams {
    int k = 5;
};

/// Uniform-weight k-nearest-neighbour regression (Euclidean distance,
/// lowest training index wins distance ties).
class KnnModel {
public:
    static KnnModel fit(const KnnParams& params, const Matrix& features, const Vector& targets);

    Vector predict(const Matrix& features) const;
    double predict_row(const Vector& row) const;

    int k() const noexcept { return k_; }

private:
    int k_ = 1;
    Matrix features_;
    Vector targets_;
};

} // namespace stlens::learners
