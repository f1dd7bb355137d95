#include "stlens/learners/mars.hpp"
#include "stlens/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stlens::learners {

namespace {

// Orthonormal basis of the selected columns, kept by modified Gram-Schmidt.
struct OrthoBasis {
    Matrix q;
    Eigen::Index used = 0;

    explicit OrthoBasis(Eigen::Index rows, Eigen::Index capacity) : q(rows, capacity) {}

    // Component of `b` orthogonal to the basis; returns false when it is
    // numerically inside the span.
    bool orthogonalize(const Vector& b, Vector& out) const {
        const double norm_b = b.squaredNorm();
        if (!(norm_b > 0.0)) {
            return false;
        }
        out = b;
        for (Eigen::Index j = 0; j < used; ++j) {
            out -= q.col(j).dot(out) * q.col(j);
        }
        return out.squaredNorm() > 1e-10 * norm_b;
    }

    void push(const Vector& orthogonal) {
        q.col(used++) = orthogonal.normalized();
    }
};

double subset_rss(const Matrix& columns, const std::vector<Eigen::Index>& subset, const Vector& y, Vector* coef) {
    Matrix b(columns.rows(), static_cast<Eigen::Index>(subset.size()));
    for (std::size_t j = 0; j < subset.size(); ++j) {
        b.col(static_cast<Eigen::Index>(j)) = columns.col(subset[j]);
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(b);
    Vector c = qr.solve(y);
    const double rss = (y - b * c).squaredNorm();
    if (coef != nullptr) {
        *coef = std::move(c);
    }
    return rss;
}

} // namespace

double hinge_basis(double x, double knot, HingeDirection direction) {
    return direction == HingeDirection::Positive ? std::max(0.0, x - knot) : std::max(0.0, knot - x);
}

double BasisFunction::evaluate(const Eigen::Ref<const Vector>& row) const {
    double v = 1.0;
    for (const auto& f : factors) {
        v *= hinge_basis(row(f.variable), f.knot, f.direction);
    }
    return v;
}

double MarsModel::gcv(double rss, std::size_t rows, std::size_t terms, double penalty) {
    const auto n = static_cast<double>(rows);
    const double complexity = static_cast<double>(terms) + penalty * static_cast<double>(terms - 1) / 2.0;
    if (complexity >= n) {
        return std::numeric_limits<double>::infinity();
    }
    const double d = 1.0 - complexity / n;
    return (rss / n) / (d * d);
}

MarsModel MarsModel::fit(const MarsParams& params, const Matrix& features, const Vector& targets) {
    require(params.max_terms >= 1, ErrorCode::InvalidArgument, "mars: max_terms must be at least 1");
    require(params.degree == 1 || params.degree == 2, ErrorCode::InvalidArgument, "mars: degree must be 1 or 2");
    require(params.gcv_penalty >= 0.0, ErrorCode::InvalidArgument, "mars: GCV penalty must be nonnegative");
    require(features.rows() == targets.size(), ErrorCode::DimensionMismatch, "mars: feature/target row mismatch");
    require(features.rows() >= 2, ErrorCode::InsufficientData, "mars: needs at least two training rows");

    const Eigen::Index n = features.rows();
    const Eigen::Index p = features.cols();
    const auto max_terms = static_cast<Eigen::Index>(params.max_terms);

    // Sorted unique knot candidates per variable.
    std::vector<std::vector<double>> knots(static_cast<std::size_t>(p));
    for (Eigen::Index v = 0; v < p; ++v) {
        auto& k = knots[static_cast<std::size_t>(v)];
        k.assign(features.col(v).data(), features.col(v).data() + n);
        std::sort(k.begin(), k.end());
        k.erase(std::unique(k.begin(), k.end()), k.end());
    }

    MarsModel model;
    model.dimension_ = p;
    std::vector<BasisFunction> basis{BasisFunction{}};
    Matrix columns(n, max_terms);
    columns.col(0).setOnes();

    OrthoBasis ortho(n, max_terms);
    ortho.push(columns.col(0));
    Vector residual = targets.array() - targets.mean();
    model.forward_rss_.push_back(residual.squaredNorm());
    const double rss0 = model.forward_rss_.front();

    Vector hinge_pos(n);
    Vector hinge_neg(n);
    Vector u1(n);
    Vector u2(n);
    Vector u2_alone(n);

    while (static_cast<Eigen::Index>(basis.size()) < max_terms) {
        const bool pair_fits = static_cast<Eigen::Index>(basis.size()) + 2 <= max_terms;
        struct Best {
            double gain = 0.0;
            std::size_t parent = 0;
            Eigen::Index variable = -1;
            double knot = 0.0;
            int which = 0; // 0 pair, 1 positive only, 2 negative only
            bool found = false;
        } best;

        for (std::size_t parent = 0; parent < basis.size(); ++parent) {
            const auto& pf = basis[parent].factors;
            if (static_cast<int>(pf.size()) >= params.degree) {
                continue;
            }
            const Vector parent_col = columns.col(static_cast<Eigen::Index>(parent));
            for (Eigen::Index v = 0; v < p; ++v) {
                if (std::any_of(pf.begin(), pf.end(), [&](const HingeFactor& f) { return f.variable == v; })) {
                    continue;
                }
                for (double knot : knots[static_cast<std::size_t>(v)]) {
                    for (Eigen::Index i = 0; i < n; ++i) {
                        const double x = features(i, v);
                        hinge_pos(i) = parent_col(i) * std::max(0.0, x - knot);
                        hinge_neg(i) = parent_col(i) * std::max(0.0, knot - x);
                    }
                    const bool ok1 = ortho.orthogonalize(hinge_pos, u1);
                    const bool ok2_alone = ortho.orthogonalize(hinge_neg, u2_alone);
                    const double g1 = ok1 ? std::pow(u1.dot(residual), 2) / u1.squaredNorm() : 0.0;
                    const double g2_alone = ok2_alone ? std::pow(u2_alone.dot(residual), 2) / u2_alone.squaredNorm() : 0.0;

                    auto consider = [&](double gain, int which) {
                        if (gain > best.gain * (1.0 + 1e-12) + 1e-300) {
                            best = Best{gain, parent, v, knot, which, true};
                        }
                    };
                    if (pair_fits && ok1 && ok2_alone) {
                        u2 = u2_alone - (u1.dot(u2_alone) / u1.squaredNorm()) * u1;
                        double g = g1;
                        if (u2.squaredNorm() > 1e-10 * hinge_neg.squaredNorm()) {
                            g += std::pow(u2.dot(residual), 2) / u2.squaredNorm();
                        }
                        consider(g, 0);
                    } else {
                        if (ok1) consider(g1, 1);
                        if (ok2_alone) consider(g2_alone, 2);
                    }
                }
            }
        }

        if (!best.found || best.gain <= 1e-12 * rss0) {
            break;
        }

        const Vector parent_col = columns.col(static_cast<Eigen::Index>(best.parent));
        auto add_term = [&](HingeDirection dir) {
            BasisFunction bf = basis[best.parent];
            bf.factors.push_back(HingeFactor{static_cast<int>(best.variable), best.knot, dir});
            const auto idx = static_cast<Eigen::Index>(basis.size());
            for (Eigen::Index i = 0; i < n; ++i) {
                columns(i, idx) = parent_col(i) * hinge_basis(features(i, best.variable), best.knot, dir);
            }
            Vector u(n);
            if (ortho.orthogonalize(columns.col(idx), u)) {
                ortho.push(u);
                const Vector& qc = ortho.q.col(ortho.used - 1);
                residual -= qc.dot(residual) * qc;
            }
            basis.push_back(std::move(bf));
        };
        if (best.which == 0 || best.which == 1) add_term(HingeDirection::Positive);
        if (best.which == 0 || best.which == 2) add_term(HingeDirection::Negative);
        model.forward_rss_.push_back(residual.squaredNorm());
    }

    // Backward elimination: drop the term whose removal raises RSS least,
    // keep the subset with minimal GCV. The intercept is never removed.
    const auto m = basis.size();
    std::vector<Eigen::Index> current(m);
    for (std::size_t j = 0; j < m; ++j) current[j] = static_cast<Eigen::Index>(j);

    const Matrix used_columns = columns.leftCols(static_cast<Eigen::Index>(m));
    const auto rows = static_cast<std::size_t>(n);
    double current_rss = subset_rss(used_columns, current, targets, nullptr);
    model.full_gcv_ = gcv(current_rss, rows, m, params.gcv_penalty);
    std::vector<Eigen::Index> best_subset = current;
    double best_gcv = model.full_gcv_;

    while (current.size() > 1) {
        double best_rss = std::numeric_limits<double>::infinity();
        std::size_t drop = 0;
        for (std::size_t j = 1; j < current.size(); ++j) {
            auto trial = current;
            trial.erase(trial.begin() + static_cast<long>(j));
            const double rss = subset_rss(used_columns, trial, targets, nullptr);
            if (rss < best_rss) {
                best_rss = rss;
                drop = j;
            }
        }
        current.erase(current.begin() + static_cast<long>(drop));
        const double g = gcv(best_rss, rows, current.size(), params.gcv_penalty);
        if (g <= best_gcv) {
            best_gcv = g;
            best_subset = current;
        }
    }

    Vector coef;
    subset_rss(used_columns, best_subset, targets, &coef);
    model.pruned_gcv_ = best_gcv;
    for (auto j : best_subset) {
        model.basis_.push_back(basis[static_cast<std::size_t>(j)]);
    }
    model.coefficients_ = coef;
    return model;
}

double MarsModel::predict_row(const Vector& row) const {
    require(row.size() == dimension_, ErrorCode::DimensionMismatch, "mars: feature dimension mismatch");
    double v = 0.0;
    for (std::size_t j = 0; j < basis_.size(); ++j) {
        v += coefficients_(static_cast<Eigen::Index>(j)) * basis_[j].evaluate(row);
    }
    return v;
}

Vector MarsModel::predict(const Matrix& features) const {
    Vector out(features.rows());
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        out(i) = predict_row(features.row(i).transpose());
    }
    return out;
}

} // namespace stlens::learners
