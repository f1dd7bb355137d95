#pragma once

#include "stlens/types.hpp"

#include <vector>

namespace stlens::learners {

enum class HingeDirection { Positive, Negative };

/// max(0, x - knot) for Positive, max(0, knot - x) for Negative.
double hinge_basis(double x, double knot, HingeDirection direction);

struct MarsParams {
    int max_terms = 9; // including the intercept
    int degree = 1;    // maximum interaction order
    double gcv_penalty = 3.0;
};

struct HingeFactor {
    int variable = 0;
    double knot = 0.0;
    HingeDirection direction = HingeDirection::Positive;
};

/// Product of hinge factors; an empty product is the intercept.
struct BasisFunction {
    std::vector<HingeFactor> factors;
    double evaluate(const Eigen::Ref<const Vector>& row) const;
};

/// Multivariate adaptive regression splines: forward stepwise selection of
/// reflected hinge pairs followed by backward elimination scored by GCV.
class MarsModel {
public:
    static MarsModel fit(const MarsParams& params, const Matrix& features, const Vector& targets);

    Vector predict(const Matrix& features) const;
    double predict_row(const Vector& row) const;

    const std::vector<BasisFunction>& basis() const noexcept { return basis_; }
    const Vector& coefficients() const noexcept { return coefficients_; }
    /// Training RSS after each forward step (first entry: intercept only).
    const std::vector<double>& forward_rss() const noexcept { return forward_rss_; }
    double full_gcv() const noexcept { return full_gcv_; }
    double pruned_gcv() const noexcept { return pruned_gcv_; }

    static double gcv(double rss, std::size_t rows, std::size_t terms, double penalty);

private:
    std::vector<BasisFunction> basis_;
    Vector coefficients_;
    std::vector<double> forward_rss_;
    double full_gcv_ = 0.0;
    double pruned_gcv_ = 0.0;
    Eigen::Index dimension_ = 0;
};

} // namespace stlens::learners
