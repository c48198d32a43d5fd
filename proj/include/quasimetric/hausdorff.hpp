#pragma once

// Set-to-set distances on a finite quasi-metric space.
//
// forward(A,B)  = max_{a in A} min_{b in B} d(a,b)
// backward(A,B) = max_{b in B} min_{a in A} d(a,b)
// max(A,B)      = max(forward, backward)

#include <cstddef>
#include <span>
#include <vector>

#include "quasimetric/core.hpp"
#include "quasimetric/weight.hpp"

namespace quasimetric {

using PointSubset = std::vector<std::size_t>;

/// Throws StructuralError for an empty subset, repeated or out-of-range indices.
void require_subset(const Matrix& d, std::span<const std::size_t> s);

double qh_forward(const Matrix& d, std::span<const std::size_t> a, std::span<const std::size_t> b);
double qh_backward(const Matrix& d, std::span<const std::size_t> a, std::span<const std::size_t> b);
double qh_max(const Matrix& d, std::span<const std::size_t> a, std::span<const std::size_t> b);

/// Classical Hausdorff distance under a symmetric metric.
double hausdorff_metric(const FiniteMetric& rho, std::span<const std::size_t> a,
                        std::span<const std::size_t> b);

/// forward(A,B) minus rho(A,B) + (min_B w - max_A w) / 2, with rho(A,B) read
/// two ways: the forward-only rho-Hausdorff distance and the symmetric one.
/// Neither residual is zero in general; both are reported.
struct WeightedFormulaResidual {
    double qh_forward = 0.0;
    double forward_rho = 0.0;      // forward rho-Hausdorff distance
    double symmetric_rho = 0.0;    // classical rho-Hausdorff distance
    double weight_term = 0.0;      // (min_B w - max_A w) / 2
    double forward_residual = 0.0;
    double symmetric_residual = 0.0;
};
WeightedFormulaResidual weighted_formula_residual(const WeightedQuasiMetric& qw,
                                                  std::span<const std::size_t> a,
                                                  std::span<const std::size_t> b);

/// Forward Hausdorff distance between E(x) and E(y) in M x [0, inf) with
/// delta((u,s),(z,t)) = d*(u,z) + |s - t|, where E(z) = {(y,t) : d(y,z) <= t}.
/// The height optimisation is done in closed form:
///   max_u min_z [ d*(u,z) + max(0, d(z,y) - d(u,x)) ].
double e_embedding_distance(const Matrix& d, std::size_t x, std::size_t y);

}  // namespace quasimetric
