#pragma once

#include "stlens/types.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace stlens {

/// Column-wise z-scoring learned from training rows. Constant columns keep
/// a unit scale, so they map to zero.
class Standardizer {
public:
    static Standardizer fit(const Matrix& train_features);

    Matrix apply(const Matrix& features) const;
    Vector apply_row(const Vector& row) const;

    const Vector& means() const noexcept { return means_; }
    const Vector& stds() const noexcept { return stds_; }

private:
    Vector means_;
    Vector stds_;
};

/// Principal components kept to reach a cumulative explained-variance threshold.
class PcaModel {
public:
    static PcaModel fit(const Matrix& train_features, double threshold);

    /// Scores on the kept components.
    Matrix transform(const Matrix& features) const;
    Vector transform_row(const Vector& row) const;
    /// Maps scores back to feature space (exact when every component is kept).
    Matrix inverse_transform(const Matrix& scores) const;

    std::size_t kept() const noexcept { return static_cast<std::size_t>(components_.cols()); }
    double threshold() const noexcept { return threshold_; }
    /// n_features x k orthonormal loadings, sign-canonicalized.
    const Matrix& components() const noexcept { return components_; }
    const Vector& center() const noexcept { return center_; }
    /// Ratios of the kept components.
    std::vector<double> explained_variance_ratio() const;
    /// Ratios of every component (sums to one).
    const std::vector<double>& all_variance_ratios() const noexcept { return all_ratios_; }
    double cumulative_ratio() const;

private:
    Matrix components_;
    Vector center_;
    std::vector<double> all_ratios_;
    double threshold_ = 0.95;
};

struct TimeSliceConfig {
    std::size_t initial_window = 120;
    std::size_t horizon = 1;
    bool growing = true;
};

struct TimeSlice {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
};

/// Rolling-origin splits over rows 0..n_rows-1, one step apart.
std::vector<TimeSlice> time_slices(std::size_t n_rows, const TimeSliceConfig& config);

} // namespace stlens
