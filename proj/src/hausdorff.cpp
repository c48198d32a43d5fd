#include "quasimetric/hausdorff.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace quasimetric {

void require_subset(const Matrix& d, std::span<const std::size_t> s) {
    if (s.empty()) throw StructuralError("subset is empty");
    std::vector<std::size_t> sorted(s.begin(), s.end());
    std::sort(sorted.begin(), sorted.end());
    if (sorted.back() >= d.size())
        throw StructuralError("subset index " + std::to_string(sorted.back()) + " out of range");
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw StructuralError("subset has repeated indices");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// max_{s in outer} min_{t in inner} dist(s, t)
template <typename Dist>
double directed(std::span<const std::size_t> outer, std::span<const std::size_t> inner, Dist dist) {
    double worst = 0.0;
    for (std::size_t s : outer) {
        double best = kInf;
        for (std::size_t t : inner) best = std::min(best, dist(s, t));
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace

double qh_forward(const Matrix& d, std::span<const std::size_t> a, std::span<const std::size_t> b) {
    require_subset(d, a);
    require_subset(d, b);
    return directed(a, b, [&](std::size_t x, std::size_t y) { return d(x, y); });
}

double qh_backward(const Matrix& d, std::span<const std::size_t> a,
                   std::span<const std::size_t> b) {
    require_subset(d, a);
    require_subset(d, b);
    return directed(b, a, [&](std::size_t y, std::size_t x) { return d(x, y); });
}

double qh_max(const Matrix& d, std::span<const std::size_t> a, std::span<const std::size_t> b) {
    return std::max(qh_forward(d, a, b), qh_backward(d, a, b));
}

double hausdorff_metric(const FiniteMetric& rho, std::span<const std::size_t> a,
                        std::span<const std::size_t> b) {
    return qh_max(rho.matrix(), a, b);
}

WeightedFormulaResidual weighted_formula_residual(const WeightedQuasiMetric& qw,
                                                  std::span<const std::size_t> a,
                                                  std::span<const std::size_t> b) {
    const Matrix& d = qw.matrix();
    const auto& w = qw.weight();
    const Matrix rho = symmetrize(d);
    WeightedFormulaResidual r;
    r.qh_forward = qh_forward(d, a, b);
    r.forward_rho = qh_forward(rho, a, b);
    r.symmetric_rho = qh_max(rho, a, b);
    double min_b = kInf, max_a = -kInf;
    for (std::size_t j : b) min_b = std::min(min_b, w[j]);
    for (std::size_t i : a) max_a = std::max(max_a, w[i]);
    r.weight_term = 0.5 * (min_b - max_a);
    r.forward_residual = r.qh_forward - (r.forward_rho + r.weight_term);
    r.symmetric_residual = r.qh_forward - (r.symmetric_rho + r.weight_term);
    return r;
}

double e_embedding_distance(const Matrix& d, std::size_t x, std::size_t y) {
    const std::size_t n = d.size();
    if (x >= n || y >= n) throw StructuralError("point index out of range");
    const Matrix dstar = max_metric(d);
    double sup = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
        // Worst height for u is the lowest one admitted by E(x), d(u,x).
        double inf = kInf;
        for (std::size_t z = 0; z < n; ++z)
            inf = std::min(inf, dstar(u, z) + std::max(0.0, d(z, y) - d(u, x)));
        sup = std::max(sup, inf);
    }
    return sup;
}

}  // namespace quasimetric
