#pragma once

#include "stlens/series.hpp"
#include "stlens/types.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace testing {

inline stlens::Matrix random_matrix(std::mt19937_64& rng, int rows, int cols) {
    std::normal_distribution<double> n(0.0, 1.0);
    stlens::Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) m(i, j) = n(rng);
    }
    return m;
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double mean = 0.0, double sd = 1.0) {
    std::normal_distribution<double> d(mean, sd);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

inline double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Seasonal series with spikes, roughly the shape of monthly fire counts.
inline stlens::TimeSeries fire_like(std::uint64_t seed, std::size_t n = 255) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.15);
    std::vector<double> v(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double month = static_cast<double>((t + 5) % 12);
        const double season = std::exp(-0.5 * std::pow((month - 8.0) / 1.3, 2.0));
        const double level = 3000.0 + 600.0 * std::sin(2.0 * M_PI * static_cast<double>(t) / 90.0);
        v[t] = level * (0.3 + 4.0 * season) * std::exp(noise(rng));
    }
    return stlens::TimeSeries(stlens::YearMonth{1998, 6}, 12, std::move(v));
}

// Cyclic Jacobi eigenvalue iteration on a symmetric matrix; columns of
// `vectors` are the eigenvectors, sorted by descending eigenvalue.
inline void jacobi_eigen(stlens::Matrix a, std::vector<double>& values, stlens::Matrix& vectors) {
    const int n = static_cast<int>(a.rows());
    vectors = stlens::Matrix::Identity(n, n);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        }
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = vectors(k, p);
                    const double vkq = vectors(k, q);
                    vectors(k, p) = c * vkp - s * vkq;
                    vectors(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](int x, int y) { return a(x, x) > a(y, y); });
    stlens::Matrix sorted(n, n);
    values.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        values[static_cast<std::size_t>(i)] = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
        sorted.col(i) = vectors.col(order[static_cast<std::size_t>(i)]);
    }
    vectors = sorted;
}

inline std::filesystem::path temp_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("stlens_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace testing
