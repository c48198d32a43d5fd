#pragma once

// Generators and brute-force oracles shared by the test binaries. Nothing in
// here calls into the library's checking code.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "quasimetric/core.hpp"

namespace qmtest {

using quasimetric::Matrix;
using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Shortest-path closure of a random positive matrix: always a strict
/// quasi-metric.
inline Matrix random_quasi_metric(Rng& rng, std::size_t n, double lo = 1.0, double hi = 10.0) {
    Matrix d(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d(i, j) = i == j ? 0.0 : uniform(rng, lo, hi);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
    return d;
}

/// Same, with entries that are multiples of `step` (exact in binary when
/// step is a power of two).
inline Matrix random_grid_quasi_metric(Rng& rng, std::size_t n, int max_units, double step) {
    Matrix d(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            d(i, j) = i == j ? 0.0 : step * static_cast<double>(pick(rng, 1, max_units));
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
    return d;
}

/// Euclidean distances between random points in the plane.
inline Matrix random_metric(Rng& rng, std::size_t n) {
    std::vector<std::pair<double, double>> pts(n);
    for (auto& p : pts) p = {uniform(rng, 0.0, 10.0), uniform(rng, 0.0, 10.0)};
    Matrix d(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            d(i, j) = std::hypot(pts[i].first - pts[j].first, pts[i].second - pts[j].second);
    return d;
}

/// f = c * min_j (rho(., s_j) + a_j) with c < 1 is c-Lipschitz for rho, so
/// w = 2f (shifted to be nonnegative) satisfies the weight bound strictly.
inline std::vector<double> random_lipschitz_weight(Rng& rng, const Matrix& rho) {
    const std::size_t n = rho.size();
    const double c = uniform(rng, 0.1, 0.95);
    const std::size_t anchors = pick(rng, 1, 3);
    std::vector<std::size_t> s(anchors);
    std::vector<double> a(anchors);
    for (std::size_t k = 0; k < anchors; ++k) {
        s[k] = pick(rng, 0, n - 1);
        a[k] = uniform(rng, 0.0, 5.0);
    }
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        double f = INFINITY;
        for (std::size_t k = 0; k < anchors; ++k) f = std::min(f, rho(i, s[k]) + a[k]);
        w[i] = 2.0 * c * f;
    }
    const double lo = *std::min_element(w.begin(), w.end());
    const double shift = uniform(rng, 0.0, 3.0);
    for (auto& x : w) x = x - lo + shift;
    return w;
}

/// d(x,y) = rho(x,y) + (w(y) - w(x))/2, written out independently.
inline Matrix weighted_from(const Matrix& rho, const std::vector<double>& w) {
    Matrix d(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i)
        for (std::size_t j = 0; j < rho.size(); ++j)
            d(i, j) = i == j ? 0.0 : rho(i, j) + 0.5 * (w[j] - w[i]);
    return d;
}

inline bool brute_triangle(const Matrix& d, double tol) {
    const std::size_t n = d.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                if (d(i, j) > d(i, k) + d(k, j) + tol) return false;
    return true;
}

inline bool brute_quasi_metric(const Matrix& d, double tol) {
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = 0; j < d.size(); ++j) {
            if (i == j && d(i, j) != 0.0) return false;
            if (i != j && d(i, j) <= 0.0) return false;
        }
    return brute_triangle(d, tol);
}

/// Weightable iff the antisymmetric part a(i,j) = d(i,j) - d(j,i) is a
/// gradient: a(i,j) = a(i,k) + a(k,j) for every triple.
inline bool brute_weightable(const Matrix& d, double tol) {
    const std::size_t n = d.size();
    auto a = [&](std::size_t i, std::size_t j) { return d(i, j) - d(j, i); };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                if (std::abs(a(i, j) - a(i, k) - a(k, j)) > tol) return false;
    return true;
}

/// Largest deviation of x - y from a constant.
inline double constant_offset_deviation(const std::vector<double>& x, const std::vector<double>& y) {
    const double c = x[0] - y[0];
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(x[i] - y[i] - c));
    return worst;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
    return worst;
}

inline Matrix w3() { return Matrix::from_rows({{0, 3, 4.5}, {1, 0, 2.5}, {3.5, 3.5, 0}}); }
inline Matrix w3_rho() { return Matrix::from_rows({{0, 2, 4}, {2, 0, 3}, {4, 3, 0}}); }

/// Random nonempty subset of {0..n-1} with at most max_size elements.
inline std::vector<std::size_t> random_subset(Rng& rng, std::size_t n, std::size_t max_size) {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(pick(rng, 1, std::min(n, max_size)));
    std::sort(all.begin(), all.end());
    return all;
}

}  // namespace qmtest
