#include "stlens/learners/svr.hpp"
#include "stlens/error.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace stlens::learners {

namespace {

constexpr double kTau = 1e-12;

} // namespace

double rbf_kernel(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b, double sigma) {
    require(a.size() == b.size(), ErrorCode::DimensionMismatch, "rbf kernel: dimension mismatch");
    require(sigma > 0.0, ErrorCode::InvalidArgument, "rbf kernel: sigma must be positive");
    return std::exp(-sigma * (a - b).squaredNorm());
}

// Dual problem over 2l variables a = [alpha, alpha*]:
//   min 1/2 a'Qa + p'a  s.t. y'a = 0, 0 <= a <= C
// with y = [+1.., -1..], p = [eps - z, eps + z], Q_ij = y_i y_j K(i mod l, j mod l).
SvrModel SvrModel::fit(const SvrParams& params, const Matrix& features, const Vector& targets) {
    require(params.sigma > 0.0 && params.cost > 0.0, ErrorCode::InvalidArgument, "svr: sigma and cost must be positive");
    require(params.epsilon >= 0.0 && params.tolerance > 0.0, ErrorCode::InvalidArgument, "svr: invalid epsilon or tolerance");
    require(features.rows() == targets.size(), ErrorCode::DimensionMismatch, "svr: feature/target row mismatch");
    require(features.rows() >= 2, ErrorCode::InsufficientData, "svr: needs at least two training rows");

    SvrModel model;
    model.params_ = params;
    model.y_mean_ = targets.mean();
    const double var = (targets.array() - model.y_mean_).square().sum() / static_cast<double>(targets.size() - 1);
    model.y_scale_ = var > 0.0 ? std::sqrt(var) : 1.0;
    const Vector z = (targets.array() - model.y_mean_) / model.y_scale_;

    const auto l = static_cast<std::size_t>(features.rows());
    const std::size_t m = 2 * l;
    Matrix kernel(features.rows(), features.rows());
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        kernel(i, i) = 1.0;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double k = std::exp(-params.sigma * (features.row(i) - features.row(j)).squaredNorm());
            kernel(i, j) = k;
            kernel(j, i) = k;
        }
    }
    auto y_of = [l](std::size_t t) { return t < l ? 1.0 : -1.0; };
    auto q = [&](std::size_t a, std::size_t b) {
        return y_of(a) * y_of(b) * kernel(static_cast<Eigen::Index>(a % l), static_cast<Eigen::Index>(b % l));
    };

    const double c = params.cost;
    std::vector<double> alpha(m, 0.0);
    std::vector<double> grad(m);
    for (std::size_t t = 0; t < l; ++t) {
        grad[t] = params.epsilon - z(static_cast<Eigen::Index>(t));
        grad[t + l] = params.epsilon + z(static_cast<Eigen::Index>(t));
    }
    auto upper = [&](std::size_t t) { return alpha[t] >= c; };
    auto lower = [&](std::size_t t) { return alpha[t] <= 0.0; };

    long iter = 0;
    double violation = std::numeric_limits<double>::infinity();
    while (true) {
        // Second-order working set selection.
        double gmax = -std::numeric_limits<double>::infinity();
        double gmax2 = -std::numeric_limits<double>::infinity();
        long i_sel = -1;
        for (std::size_t t = 0; t < m; ++t) {
            if (y_of(t) > 0) {
                if (!upper(t) && -grad[t] > gmax) {
                    gmax = -grad[t];
                    i_sel = static_cast<long>(t);
                }
            } else if (!lower(t) && grad[t] > gmax) {
                gmax = grad[t];
                i_sel = static_cast<long>(t);
            }
        }
        long j_sel = -1;
        double obj_min = std::numeric_limits<double>::infinity();
        if (i_sel >= 0) {
            const auto i = static_cast<std::size_t>(i_sel);
            for (std::size_t t = 0; t < m; ++t) {
                double grad_diff = 0.0;
                double quad = 0.0;
                if (y_of(t) > 0) {
                    if (lower(t)) continue;
                    gmax2 = std::max(gmax2, grad[t]);
                    grad_diff = gmax + grad[t];
                    quad = 2.0 - 2.0 * y_of(i) * q(i, t);
                } else {
                    if (upper(t)) continue;
                    gmax2 = std::max(gmax2, -grad[t]);
                    grad_diff = gmax - grad[t];
                    quad = 2.0 + 2.0 * y_of(i) * q(i, t);
                }
                if (grad_diff > 0.0) {
                    const double obj = -(grad_diff * grad_diff) / (quad > 0.0 ? quad : kTau);
                    if (obj < obj_min) {
                        obj_min = obj;
                        j_sel = static_cast<long>(t);
                    }
                }
            }
        }
        violation = gmax + gmax2;
        if (i_sel < 0 || j_sel < 0 || violation < params.tolerance) {
            if (i_sel < 0 || j_sel < 0) violation = std::max(violation, 0.0);
            break;
        }
        if (++iter > params.max_iterations) {
            fail(ErrorCode::Convergence, "svr: solver did not reach KKT tolerance within " +
                                             std::to_string(params.max_iterations) + " iterations");
        }

        const auto i = static_cast<std::size_t>(i_sel);
        const auto j = static_cast<std::size_t>(j_sel);
        const double old_i = alpha[i];
        const double old_j = alpha[j];
        const double qij = q(i, j);
        if (y_of(i) != y_of(j)) {
            double quad = 2.0 + 2.0 * qij;
            if (quad <= 0.0) quad = kTau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = diff; }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0; alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > c) { alpha[i] = c; alpha[j] = c - diff; }
            } else if (alpha[j] > c) {
                alpha[j] = c; alpha[i] = c + diff;
            }
        } else {
            double quad = 2.0 - 2.0 * qij;
            if (quad <= 0.0) quad = kTau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > c) {
                if (alpha[i] > c) { alpha[i] = c; alpha[j] = sum - c; }
            } else if (alpha[j] < 0.0) {
                alpha[j] = 0.0; alpha[i] = sum;
            }
            if (sum > c) {
                if (alpha[j] > c) { alpha[j] = c; alpha[i] = sum - c; }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0; alpha[j] = sum;
            }
        }
        const double d_i = alpha[i] - old_i;
        const double d_j = alpha[j] - old_j;
        for (std::size_t t = 0; t < m; ++t) {
            grad[t] += q(i, t) * d_i + q(j, t) * d_j;
        }
    }

    // Bias from free variables, or the midpoint of the feasible interval.
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    int n_free = 0;
    for (std::size_t t = 0; t < m; ++t) {
        const double yg = y_of(t) * grad[t];
        if (upper(t)) {
            if (y_of(t) < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else if (lower(t)) {
            if (y_of(t) > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    const double rho = n_free > 0 ? sum_free / n_free : 0.5 * (ub + lb);

    model.support_ = features;
    model.dual_.resize(features.rows());
    for (std::size_t t = 0; t < l; ++t) {
        model.dual_(static_cast<Eigen::Index>(t)) = alpha[t] - alpha[t + l];
    }
    model.bias_ = -rho;
    model.kkt_violation_ = violation;
    model.iterations_ = iter;
    return model;
}

double SvrModel::predict_row(const Vector& row) const {
    require(row.size() == support_.cols(), ErrorCode::DimensionMismatch, "svr: feature dimension mismatch");
    double f = bias_;
    for (Eigen::Index i = 0; i < support_.rows(); ++i) {
        if (dual_(i) != 0.0) {
            f += dual_(i) * std::exp(-params_.sigma * (support_.row(i).transpose() - row).squaredNorm());
        }
    }
    return y_mean_ + y_scale_ * f;
}

Vector SvrModel::predict(const Matrix& features) const {
    Vector out(features.rows());
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        out(i) = predict_row(features.row(i).transpose());
    }
    return out;
}

} // namespace stlens::learners
