#include "stlens/learners/cubist.hpp"
#include "stlens/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace stlens::learners {

namespace {

double population_sd(double sum, double sum_sq, double n) {
    const double mean = sum / n;
    return std::sqrt(std::max(0.0, sum_sq / n - mean * mean));
}

Rule fit_leaf(const Matrix& x, const Vector& t, const std::vector<Eigen::Index>& rows,
              std::vector<RuleCondition> conditions) {
    Rule rule;
    rule.conditions = std::move(conditions);
    for (const auto& c : rule.conditions) {
        rule.variables.push_back(c.variable);
    }
    std::sort(rule.variables.begin(), rule.variables.end());
    rule.variables.erase(std::unique(rule.variables.begin(), rule.variables.end()), rule.variables.end());
    if (rule.variables.empty()) {
        rule.variables.resize(static_cast<std::size_t>(x.cols()));
        std::iota(rule.variables.begin(), rule.variables.end(), 0);
    }

    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto k = static_cast<Eigen::Index>(rule.variables.size());
    Matrix design(n, k + 1);
    Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index r = rows[static_cast<std::size_t>(i)];
        design(i, 0) = 1.0;
        for (Eigen::Index j = 0; j < k; ++j) {
            design(i, j + 1) = x(r, rule.variables[static_cast<std::size_t>(j)]);
        }
        y(i) = t(r);
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(design);
    qr.setThreshold(1e-10);
    const Vector beta = qr.solve(y);
    rule.intercept = beta(0);
    rule.coefficients = beta.tail(k);
    return rule;
}

void grow(const CubistParams& params, const Matrix& x, const Vector& t, std::vector<Eigen::Index> rows, int depth,
          std::vector<RuleCondition> conditions, std::vector<Rule>& out) {
    const auto n = static_cast<double>(rows.size());
    const auto min_leaf = static_cast<std::size_t>(params.min_leaf);
    if (depth >= params.max_depth || rows.size() < 2 * min_leaf) {
        out.push_back(fit_leaf(x, t, rows, std::move(conditions)));
        return;
    }
    double sum = 0.0;
    double sum_sq = 0.0;
    for (auto r : rows) {
        sum += t(r);
        sum_sq += t(r) * t(r);
    }
    const double sd = population_sd(sum, sum_sq, n);

    double best_sdr = 1e-9 * std::max(1.0, sd);
    int best_var = -1;
    double best_threshold = 0.0;
    std::vector<Eigen::Index> sorted = rows;
    for (Eigen::Index v = 0; v < x.cols(); ++v) {
        std::stable_sort(sorted.begin(), sorted.end(), [&](Eigen::Index a, Eigen::Index b) { return x(a, v) < x(b, v); });
        double left_sum = 0.0;
        double left_sq = 0.0;
        for (std::size_t s = 1; s < sorted.size(); ++s) {
            const double tv = t(sorted[s - 1]);
            left_sum += tv;
            left_sq += tv * tv;
            if (s < min_leaf || sorted.size() - s < min_leaf) {
                continue;
            }
            const double lo = x(sorted[s - 1], v);
            const double hi = x(sorted[s], v);
            if (!(lo < hi)) {
                continue;
            }
            const auto nl = static_cast<double>(s);
            const double nr = n - nl;
            const double sdr = sd - (nl / n) * population_sd(left_sum, left_sq, nl) -
                               (nr / n) * population_sd(sum - left_sum, sum_sq - left_sq, nr);
            if (sdr > best_sdr) {
                best_sdr = sdr;
                best_var = static_cast<int>(v);
                best_threshold = 0.5 * (lo + hi);
            }
        }
    }
    if (best_var < 0) {
        out.push_back(fit_leaf(x, t, rows, std::move(conditions)));
        return;
    }
    std::vector<Eigen::Index> left;
    std::vector<Eigen::Index> right;
    for (auto r : rows) {
        (x(r, best_var) <= best_threshold ? left : right).push_back(r);
    }
    auto left_conditions = conditions;
    left_conditions.push_back(RuleCondition{best_var, best_threshold, true});
    conditions.push_back(RuleCondition{best_var, best_threshold, false});
    grow(params, x, t, std::move(left), depth + 1, std::move(left_conditions), out);
    grow(params, x, t, std::move(right), depth + 1, std::move(conditions), out);
}

double committee_member(const std::vector<Rule>& rules, const Eigen::Ref<const Vector>& row) {
    for (const auto& rule : rules) {
        if (rule.covers(row)) {
            return rule.evaluate(row);
        }
    }
    // Leaves partition the space, so this is unreachable for finite input.
    return rules.front().evaluate(row);
}

} // namespace

bool Rule::covers(const Eigen::Ref<const Vector>& row) const {
    for (const auto& c : conditions) {
        const bool le = row(c.variable) <= c.threshold;
        if (le != c.less_equal) {
            return false;
        }
    }
    return true;
}

double Rule::evaluate(const Eigen::Ref<const Vector>& row) const {
    double v = intercept;
    for (std::size_t j = 0; j < variables.size(); ++j) {
        v += coefficients(static_cast<Eigen::Index>(j)) * row(variables[j]);
    }
    return v;
}

CubistModel CubistModel::fit(const CubistParams& params, const Matrix& features, const Vector& targets) {
    require(params.committees >= 1, ErrorCode::InvalidArgument, "cubist: committees must be at least 1");
    require(params.instances >= 0, ErrorCode::InvalidArgument, "cubist: instances must be nonnegative");
    require(params.min_leaf >= 2 && params.max_depth >= 0, ErrorCode::InvalidArgument, "cubist: invalid tree controls");
    require(features.rows() == targets.size(), ErrorCode::DimensionMismatch, "cubist: feature/target row mismatch");
    require(features.rows() >= 2, ErrorCode::InsufficientData, "cubist: needs at least two training rows");
    require(features.rows() >= params.instances, ErrorCode::InsufficientData, "cubist: fewer training rows than instances");

    CubistModel model;
    model.params_ = params;
    model.dimension_ = features.cols();
    std::vector<Eigen::Index> all(static_cast<std::size_t>(features.rows()));
    std::iota(all.begin(), all.end(), 0);

    Vector adjusted = targets;
    for (int m = 0; m < params.committees; ++m) {
        std::vector<Rule> rules;
        grow(params, features, adjusted, all, 0, {}, rules);
        if (m + 1 < params.committees) {
            for (Eigen::Index i = 0; i < features.rows(); ++i) {
                adjusted(i) = 2.0 * targets(i) - committee_member(rules, features.row(i).transpose());
            }
        }
        model.committees_.push_back(std::move(rules));
    }

    if (params.instances > 0) {
        model.features_ = features;
        model.residuals_.resize(features.rows());
        for (Eigen::Index i = 0; i < features.rows(); ++i) {
            model.residuals_(i) = targets(i) - model.rule_prediction(features.row(i).transpose());
        }
    }
    return model;
}

double CubistModel::rule_prediction(const Eigen::Ref<const Vector>& row) const {
    double sum = 0.0;
    for (const auto& rules : committees_) {
        sum += committee_member(rules, row);
    }
    return sum / static_cast<double>(committees_.size());
}

double CubistModel::predict_row(const Vector& row) const {
    require(row.size() == dimension_, ErrorCode::DimensionMismatch, "cubist: feature dimension mismatch");
    const double base = rule_prediction(row);
    if (params_.instances == 0) {
        return base;
    }
    const auto n = static_cast<std::size_t>(features_.rows());
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        dist[i] = (features_.row(static_cast<Eigen::Index>(i)).transpose() - row).squaredNorm();
    }
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    const auto k = static_cast<std::size_t>(params_.instances);
    std::partial_sort(idx.begin(), idx.begin() + static_cast<long>(k), idx.end(), [&](std::size_t a, std::size_t b) {
        return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
    });
    double correction = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        correction += residuals_(static_cast<Eigen::Index>(idx[i]));
    }
    return base + correction / static_cast<double>(k);
}

Vector CubistModel::predict(const Matrix& features) const {
    Vector out(features.rows());
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        out(i) = predict_row(features.row(i).transpose());
    }
    return out;
}

} // namespace stlens::learners
