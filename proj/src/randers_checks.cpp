#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "parallel.hpp"
#include "quasimetric/randers.hpp"

namespace quasimetric::randers {

namespace {

const Potential& require_potential(const RandersStructure& rs, const char* what) {
    const Potential* pot = rs.beta.as_potential();
    if (!pot) throw RandersError(std::string(what) + " needs a potential one-form");
    return *pot;
}

void require_node(const RandersStructure& rs, NodeId n) {
    if (n >= rs.domain.active_count())
        throw RandersError("node " + std::to_string(n) + " is not an active node");
}

}  // namespace

DecompositionCheck check_randers_decomposition(const RandersStructure& rs,
                                               std::span<const NodePair> pairs,
                                               const GraphOptions& opts, unsigned threads) {
    const Potential& pot = require_potential(rs, "the decomposition check");
    GraphOptions full = opts, bare = opts;
    full.include_beta = true;
    bare.include_beta = false;
    const DirectedGraph g = build_graph(rs, full);
    const DirectedGraph g0 = build_graph(rs, bare);

    std::map<NodeId, std::vector<std::size_t>> by_source;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        require_node(rs, pairs[k].from);
        require_node(rs, pairs[k].to);
        by_source[pairs[k].from].push_back(k);
    }
    std::vector<NodeId> sources;
    for (const auto& [s, _] : by_source) sources.push_back(s);

    std::vector<double> residual(pairs.size(), 0.0);
    detail::parallel_for(sources.size(), threads, [&](std::size_t s) {
        const NodeId x = sources[s];
        const DistanceField df = forward_distances(g, x);
        const DistanceField d0 = forward_distances(g0, x);
        const double fx = pot.f(rs.domain.position(x));
        for (std::size_t k : by_source.at(x)) {
            const NodeId y = pairs[k].to;
            const double fy = pot.f(rs.domain.position(y));
            residual[k] = std::abs(df.values[y] - d0.values[y] - (fy - fx));
        }
    });

    DecompositionCheck out;
    out.pairs = pairs.size();
    for (std::size_t k = 0; k < pairs.size(); ++k)
        if (residual[k] > out.max_residual || k == 0) {
            out.max_residual = residual[k];
            out.worst = pairs[k];
        }
    return out;
}

GridWeightSamples recover_grid_weight(const RandersStructure& rs, NodeId basepoint,
                                      std::span<const NodeId> samples, const GraphOptions& opts) {
    const Potential& pot = require_potential(rs, "grid weight recovery");
    require_node(rs, basepoint);
    GraphOptions full = opts;
    full.include_beta = true;
    const DirectedGraph g = build_graph(rs, full);
    const DistanceField from_a = forward_distances(g, basepoint);
    const DistanceField to_a = backward_distances(g, basepoint);
    const double fa = pot.f(rs.domain.position(basepoint));

    GridWeightSamples out;
    out.basepoint = basepoint;
    for (NodeId x : samples) {
        require_node(rs, x);
        const double w = from_a.values[x] - to_a.values[x];
        const double expected = 2.0 * (pot.f(rs.domain.position(x)) - fa);
        out.nodes.push_back(x);
        out.recovered.push_back(w);
        out.expected.push_back(expected);
        out.max_residual = std::max(out.max_residual, std::abs(w - expected));
    }
    return out;
}

PerimeterDefect perimeter_defect(const DirectedGraph& g, std::array<NodeId, 3> triple) {
    const auto [x, y, z] = triple;
    const DistanceField fx = forward_distances(g, x);
    const DistanceField fy = forward_distances(g, y);
    const DistanceField fz = forward_distances(g, z);
    PerimeterDefect out;
    out.triple = triple;
    out.forward_perimeter = fx.values[y] + fy.values[z] + fz.values[x];
    out.backward_perimeter = fx.values[z] + fz.values[y] + fy.values[x];
    if (!std::isfinite(out.forward_perimeter) || !std::isfinite(out.backward_perimeter))
        throw RandersError("perimeter triple is not mutually reachable");
    out.defect = out.forward_perimeter - out.backward_perimeter;
    return out;
}

BusemannMayerEstimate busemann_mayer_estimate(const RandersStructure& rs, const DirectedGraph& g,
                                              NodeId p, Vec2 v, std::span<const double> multipliers) {
    require_node(rs, p);
    std::vector<double> ks(multipliers.begin(), multipliers.end());
    if (ks.empty()) ks = {4.0, 8.0, 16.0};
    std::sort(ks.begin(), ks.end());
    const double vv = dot(v, v);
    if (!(vv > 0.0)) throw RandersError("direction must be nonzero");

    const GridDomain& dom = rs.domain;
    const Vec2 origin = dom.position(p);
    const DistanceField field = forward_distances(g, p);

    // d_F(p, q) / t for the node q nearest to p + sign * t v, with t taken
    // as the projection of q - p onto v.
    auto quotient = [&](double t, double sign) {
        const auto q = dom.nearest(origin + (sign * t) * v);
        if (!q) throw RandersError("ray from node " + std::to_string(p) + " exits the mask");
        const double t_eff = sign * dot(dom.position(*q) - origin, v) / vv;
        if (!(t_eff > 0.0)) throw RandersError("radius too small for the grid spacing");
        return std::pair{t_eff, field.values[*q] / t_eff};
    };

    BusemannMayerEstimate out;
    for (double k : ks) {
        const auto [t, fwd] = quotient(k * dom.h(), 1.0);
        out.radii.push_back(t);
        out.forward.push_back(fwd);
        out.reverse.push_back(quotient(k * dom.h(), -1.0).second);
    }
    out.smallest_t = out.forward.front();

    // Linear-in-t error model through the two smallest radii.
    auto extrapolate = [&](const std::vector<double>& f) {
        if (f.size() < 2 || out.radii[1] <= out.radii[0]) return f.front();
        const double t1 = out.radii[0], t2 = out.radii[1];
        return (t2 * f[0] - t1 * f[1]) / (t2 - t1);
    };
    out.value = extrapolate(out.forward);
    out.reverse_value = extrapolate(out.reverse);
    out.symmetric_part = 0.5 * (out.value + out.reverse_value);
    out.beta_part = 0.5 * (out.value - out.reverse_value);
    return out;
}

}  // namespace quasimetric::randers
