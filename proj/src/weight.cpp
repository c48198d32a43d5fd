#include "quasimetric/weight.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace quasimetric {

namespace {

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

void require_size(const Matrix& d, std::span<const double> w, const char* what) {
    if (w.size() != d.size())
        throw StructuralError(std::string(what) + " has " + std::to_string(w.size()) +
                              " entries for a " + std::to_string(d.size()) + "-point space");
    for (double x : w)
        if (!std::isfinite(x)) throw StructuralError(std::string(what) + " has a non-finite entry");
}

void require_nonnegative(std::span<const double> w, const char* what) {
    for (std::size_t i = 0; i < w.size(); ++i)
        if (w[i] < 0.0)
            throw StructuralError(std::string(what) + " is negative at index " + std::to_string(i));
}

std::string pair_text(std::pair<std::size_t, std::size_t> p) {
    return "(" + std::to_string(p.first) + "," + std::to_string(p.second) + ")";
}

}  // namespace

PerimeterCheck check_perimeter_identity(const Matrix& d, double tol) {
    require_finite(d);
    const double eps = effective_tolerance(d, tol);
    const std::size_t n = d.size();
    PerimeterCheck out;
    // The defect is antisymmetric under odd permutations and vanishes on
    // degenerate triples, so i < j < k covers everything.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k) {
                const double forward = d(i, j) + d(j, k) + d(k, i);
                const double backward = d(i, k) + d(k, j) + d(j, i);
                const double r = std::abs(forward - backward);
                if (r > out.max_residual) {
                    out.max_residual = r;
                    out.worst_triple = {i, j, k};
                }
            }
    out.holds = out.max_residual <= eps;
    return out;
}

NotWeightable::NotWeightable(PerimeterCheck check)
    : std::runtime_error("perimeter identity fails at triple (" +
                         std::to_string(check.worst_triple[0]) + "," +
                         std::to_string(check.worst_triple[1]) + "," +
                         std::to_string(check.worst_triple[2]) + "), residual " +
                         std::to_string(check.max_residual)),
      check_(check) {}

std::vector<double> basepoint_weight(const Matrix& d, std::size_t a) {
    if (a >= d.size()) throw StructuralError("basepoint " + std::to_string(a) + " out of range");
    std::vector<double> w(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) w[i] = d(a, i) - d(i, a);
    return w;
}

GeneralizedWeight recover_weight(const Matrix& d, std::size_t a, double tol) {
    if (a >= d.size()) throw StructuralError("basepoint " + std::to_string(a) + " out of range");
    PerimeterCheck check = check_perimeter_identity(d, tol);
    if (!check.holds) throw NotWeightable(check);
    return {basepoint_weight(d, a), a};
}

std::vector<double> normalize_weight(std::span<const double> w) {
    if (w.empty()) return {};
    const double lo = *std::min_element(w.begin(), w.end());
    std::vector<double> out(w.begin(), w.end());
    for (double& x : out) x -= lo;
    return out;
}

double weightability_residual(const Matrix& d, std::span<const double> w) {
    require_size(d, w, "weight");
    double worst = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = i + 1; j < d.size(); ++j)
            worst = std::max(worst, std::abs(d(i, j) + w[i] - d(j, i) - w[j]));
    return worst;
}

LipschitzCheck check_lipschitz(const Matrix& rho, std::span<const double> g, double scale) {
    require_size(rho, g, "function");
    LipschitzCheck out;
    for (std::size_t i = 0; i < rho.size(); ++i)
        for (std::size_t j = i + 1; j < rho.size(); ++j) {
            const double excess = scale * std::abs(g[i] - g[j]) - rho(i, j);
            if (excess > out.max_excess) {
                out.max_excess = excess;
                out.worst_pair = {i, j};
            }
        }
    return out;
}

ValidationReport validate_weighted(const Matrix& d, std::span<const double> w,
                                   const ValidationOptions& opts) {
    require_size(d, w, "weight");
    ValidationReport r = validate_quasi_metric(d, opts);
    const double tol = opts.tol * std::max({1.0, d.max_abs(), max_abs(w)});
    const std::size_t n = d.size();
    for (std::size_t i = 0; i < n; ++i)
        if (w[i] < 0.0) r.record("weight_nonnegative", {i}, -w[i], tol);
    const Matrix rho = symmetrize(d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            r.record("weightability", {i, j}, std::abs(d(i, j) + w[i] - d(j, i) - w[j]), tol);
            r.record("weight_bound", {i, j},
                     std::max(0.0, 0.5 * std::abs(w[i] - w[j]) - rho(i, j)), tol);
        }
    r.passed = r.violations.empty();
    return r;
}

WeightedQuasiMetric WeightedQuasiMetric::create(FiniteQuasiMetric q, std::vector<double> w,
                                                const ValidationOptions& opts) {
    ValidationReport r = validate_weighted(q.matrix(), w, opts);
    if (!r.passed)
        throw AxiomError("not a weighted quasi-metric: " + r.violations.front().axiom, r);
    return WeightedQuasiMetric(std::move(q), std::move(w));
}

namespace {

// Shared by compose and graph_space: rho + scale * (g(j) - g(i)), where the
// Lipschitz condition scale * |g(i) - g(j)| <= rho(i,j) must hold (strictly,
// unless weak separation is requested).
Matrix lift(const FiniteMetric& rho, std::span<const double> g, double scale,
            const ValidationOptions& opts, const char* what) {
    const Matrix& r = rho.matrix();
    require_size(r, g, what);
    require_nonnegative(g, what);
    const double tol = opts.tol * std::max({1.0, r.max_abs(), max_abs(g)});
    LipschitzCheck lc = check_lipschitz(r, g, scale);
    const bool bad = opts.weak_separation ? lc.max_excess > tol : lc.max_excess >= -tol;
    if (r.size() > 1 && bad)
        throw LipschitzError(std::string(what) + " violates the Lipschitz bound at pair " +
                                 pair_text(lc.worst_pair) + " (excess " +
                                 std::to_string(lc.max_excess) + ")",
                             lc);
    const std::size_t n = r.size();
    Matrix d(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            d(i, j) = i == j ? 0.0 : r(i, j) + scale * (g[j] - g[i]);
    return d;
}

}  // namespace

WeightedQuasiMetric compose(const FiniteMetric& rho, std::span<const double> w,
                            const ValidationOptions& opts) {
    Matrix d = lift(rho, w, 0.5, opts, "weight");
    return WeightedQuasiMetric::create(FiniteQuasiMetric::unchecked(rho.labels(), std::move(d)),
                                       std::vector<double>(w.begin(), w.end()), opts);
}

std::pair<FiniteMetric, std::vector<double>> decompose(const WeightedQuasiMetric& qw) {
    return {symmetrize(qw.space()), qw.weight()};
}

BundleValue bundle_distance(const FiniteMetric& rho, BundlePoint u, BundlePoint v) {
    if (u.base >= rho.size() || v.base >= rho.size())
        throw StructuralError("bundle point outside the base space");
    if (u.height < 0.0 || v.height < 0.0) throw StructuralError("bundle height must be >= 0");
    const double q = rho(u.base, v.base) + v.height - u.height;
    return {q, q < 0.0};
}

WeightedQuasiMetric graph_space(const FiniteMetric& rho, std::span<const double> f,
                                const ValidationOptions& opts) {
    Matrix d = lift(rho, f, 1.0, opts, "function");
    std::vector<double> w(f.size());
    std::transform(f.begin(), f.end(), w.begin(), [](double x) { return 2.0 * x; });
    return WeightedQuasiMetric::create(FiniteQuasiMetric::unchecked(rho.labels(), std::move(d)),
                                       std::move(w), opts);
}

ValidationReport check_embedding(const Matrix& d, std::span<const double> w, double tol) {
    require_size(d, w, "weight");
    const FiniteMetric rho = FiniteMetric::unchecked({}, symmetrize(d));
    const std::size_t n = d.size();
    ValidationReport r;
    for (std::size_t i = 0; i < n; ++i) {
        const BundlePoint u{i, 0.5 * w[i]};
        r.record("weight_preserved", {i}, std::abs(bundle_weight(u) - w[i]), tol);
        for (std::size_t j = 0; j < n; ++j) {
            const BundlePoint v{j, 0.5 * w[j]};
            const double q = bundle_distance(rho, u, v).distance;
            r.record("isometry", {i, j}, std::abs(q - d(i, j)), tol);
        }
    }
    return r;
}

}  // namespace quasimetric
