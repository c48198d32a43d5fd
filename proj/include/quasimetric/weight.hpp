#pragma once

// Weightable quasi-metrics: the perimeter test, weight recovery, the
// rho/w decomposition, and the bundle and graph-of-function constructions.

#include <array>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "quasimetric/core.hpp"

namespace quasimetric {

struct PerimeterCheck {
    bool holds = true;
    double max_residual = 0.0;
    std::array<std::size_t, 3> worst_triple{0, 0, 0};
};

/// Compares the two orientations of every triangle x->y->z->x.
/// tol is relative, see effective_tolerance.
PerimeterCheck check_perimeter_identity(const Matrix& d, double tol = 1e-9);
inline PerimeterCheck check_perimeter_identity(const FiniteQuasiMetric& q, double tol = 1e-9) {
    return check_perimeter_identity(q.matrix(), tol);
}

/// A possibly negative weight anchored at a basepoint.
struct GeneralizedWeight {
    std::vector<double> values;
    std::size_t basepoint = 0;
};

class NotWeightable : public std::runtime_error {
public:
    explicit NotWeightable(PerimeterCheck check);
    const PerimeterCheck& check() const noexcept { return check_; }

private:
    PerimeterCheck check_;
};

/// w[i] = d(a,i) - d(i,a) with no precondition check.
std::vector<double> basepoint_weight(const Matrix& d, std::size_t a);

/// basepoint_weight guarded by the perimeter identity; throws NotWeightable.
GeneralizedWeight recover_weight(const Matrix& d, std::size_t a, double tol = 1e-9);
inline GeneralizedWeight recover_weight(const FiniteQuasiMetric& q, std::size_t a,
                                        double tol = 1e-9) {
    return recover_weight(q.matrix(), a, tol);
}

/// Shifts by the minimum so the smallest entry is 0.
std::vector<double> normalize_weight(std::span<const double> w);
inline std::vector<double> normalize_weight(const GeneralizedWeight& gw) {
    return normalize_weight(gw.values);
}

/// max over pairs of |d(i,j) + w(i) - d(j,i) - w(j)|.
double weightability_residual(const Matrix& d, std::span<const double> w);

/// Excess of 1/2 |w(i) - w(j)| over rho(i,j), maximised over pairs i != j.
struct LipschitzCheck {
    double max_excess = -std::numeric_limits<double>::infinity();
    std::pair<std::size_t, std::size_t> worst_pair{0, 0};
};
LipschitzCheck check_lipschitz(const Matrix& rho, std::span<const double> half_w_or_f,
                               double scale);

class LipschitzError : public std::runtime_error {
public:
    LipschitzError(const std::string& what, LipschitzCheck check)
        : std::runtime_error(what), check_(check) {}
    const LipschitzCheck& check() const noexcept { return check_; }

private:
    LipschitzCheck check_;
};

class WeightedQuasiMetric {
public:
    /// Checks the quasi-metric axioms, non-negativity of w, weightability and
    /// the Lipschitz bound. Throws AxiomError on failure.
    static WeightedQuasiMetric create(FiniteQuasiMetric q, std::vector<double> w,
                                      const ValidationOptions& opts = {});

    const FiniteQuasiMetric& space() const noexcept { return q_; }
    const Matrix& matrix() const noexcept { return q_.matrix(); }
    const std::vector<double>& weight() const noexcept { return w_; }
    std::size_t size() const noexcept { return q_.size(); }

private:
    WeightedQuasiMetric(FiniteQuasiMetric q, std::vector<double> w)
        : q_(std::move(q)), w_(std::move(w)) {}

    FiniteQuasiMetric q_;
    std::vector<double> w_;
};

/// Full weighted-space check: quasi-metric axioms plus weight axioms.
ValidationReport validate_weighted(const Matrix& d, std::span<const double> w,
                                   const ValidationOptions& opts = {});

/// d(x,y) = rho(x,y) + (w(y) - w(x)) / 2. Throws LipschitzError when
/// 1/2 |w(x) - w(y)| exceeds rho(x,y) (or reaches it, unless weak separation).
WeightedQuasiMetric compose(const FiniteMetric& rho, std::span<const double> w,
                            const ValidationOptions& opts = {});

/// Inverse of compose: (symmetrization, weight).
std::pair<FiniteMetric, std::vector<double>> decompose(const WeightedQuasiMetric& qw);

struct BundlePoint {
    std::size_t base = 0;
    double height = 0.0;
};

struct BundleValue {
    double distance = 0.0;
    bool generalized = false;  // distance < 0, allowed in the bundle
};

/// Q(u,v) = d(x,y) + eta - xi for u = (x, xi), v = (y, eta).
BundleValue bundle_distance(const FiniteMetric& rho, BundlePoint u, BundlePoint v);
inline double bundle_weight(BundlePoint u) { return 2.0 * u.height; }

/// Graph of a 1-Lipschitz f >= 0: Q(i,j) = rho(i,j) + f(j) - f(i), W = 2f.
WeightedQuasiMetric graph_space(const FiniteMetric& rho, std::span<const double> f,
                                const ValidationOptions& opts = {});

/// Verifies that i -> (i, w(i)/2) is an isometric embedding into the bundle
/// over the symmetrization, with matching weights. tol is absolute.
ValidationReport check_embedding(const Matrix& d, std::span<const double> w, double tol = 1e-12);
inline ValidationReport check_embedding(const WeightedQuasiMetric& qw, double tol = 1e-12) {
    return check_embedding(qw.matrix(), qw.weight(), tol);
}

}  // namespace quasimetric
