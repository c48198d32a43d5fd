#include <cmath>
#include <numeric>
#include <queue>
#include <string>

#include "quasimetric/randers.hpp"

namespace quasimetric::randers {

Stencil stencil_from_int(int k) {
    if (k == 8) return Stencil::eight;
    if (k == 16) return Stencil::sixteen;
    throw RandersError("stencil must be 8 or 16, got " + std::to_string(k));
}

std::vector<std::array<int, 2>> stencil_offsets(Stencil s) {
    const int reach = s == Stencil::eight ? 1 : 2;
    std::vector<std::array<int, 2>> out;
    for (int dj = -reach; dj <= reach; ++dj)
        for (int di = -reach; di <= reach; ++di) {
            if (di == 0 && dj == 0) continue;
            if (std::gcd(di, dj) != 1) continue;
            out.push_back({di, dj});
        }
    return out;
}

DirectedGraph::DirectedGraph(std::size_t node_count, std::vector<Edge> edges) {
    out_offsets_.assign(node_count + 1, 0);
    in_offsets_.assign(node_count + 1, 0);
    for (const Edge& e : edges) {
        if (e.from >= node_count || e.to >= node_count) throw RandersError("edge endpoint out of range");
        ++out_offsets_[e.from + 1];
        ++in_offsets_[e.to + 1];
    }
    std::partial_sum(out_offsets_.begin(), out_offsets_.end(), out_offsets_.begin());
    std::partial_sum(in_offsets_.begin(), in_offsets_.end(), in_offsets_.begin());

    out_targets_.resize(edges.size());
    out_weights_.resize(edges.size());
    in_sources_.resize(edges.size());
    in_weights_.resize(edges.size());
    std::vector<std::size_t> out_fill(out_offsets_.begin(), out_offsets_.end() - 1);
    std::vector<std::size_t> in_fill(in_offsets_.begin(), in_offsets_.end() - 1);
    // Stable counting sort: adjacency order follows edge-list order.
    for (const Edge& e : edges) {
        const std::size_t o = out_fill[e.from]++;
        out_targets_[o] = e.to;
        out_weights_[o] = e.weight;
        const std::size_t i = in_fill[e.to]++;
        in_sources_[i] = e.from;
        in_weights_[i] = e.weight;
    }
}

std::span<const NodeId> DirectedGraph::neighbours(NodeId u, bool forward) const {
    const auto& off = forward ? out_offsets_ : in_offsets_;
    const auto& adj = forward ? out_targets_ : in_sources_;
    return {adj.data() + off[u], off[u + 1] - off[u]};
}

std::span<const double> DirectedGraph::weights(NodeId u, bool forward) const {
    const auto& off = forward ? out_offsets_ : in_offsets_;
    const auto& w = forward ? out_weights_ : in_weights_;
    return {w.data() + off[u], off[u + 1] - off[u]};
}

std::optional<double> DirectedGraph::weight(NodeId u, NodeId v) const {
    const auto nb = neighbours(u);
    const auto w = weights(u);
    for (std::size_t k = 0; k < nb.size(); ++k)
        if (nb[k] == v) return w[k];
    return std::nullopt;
}

bool DirectedGraph::strongly_connected() const {
    const std::size_t n = node_count();
    if (n == 0) return true;
    for (bool forward : {true, false}) {
        std::vector<char> seen(n, 0);
        std::vector<NodeId> stack{0};
        seen[0] = 1;
        std::size_t count = 1;
        while (!stack.empty()) {
            const NodeId u = stack.back();
            stack.pop_back();
            for (NodeId v : neighbours(u, forward))
                if (!seen[v]) {
                    seen[v] = 1;
                    ++count;
                    stack.push_back(v);
                }
        }
        if (count != n) return false;
    }
    return true;
}

DirectedGraph build_graph(const RandersStructure& rs, const GraphOptions& opts) {
    const GridDomain& dom = rs.domain;
    const auto offsets = stencil_offsets(opts.stencil);
    std::vector<DirectedGraph::Edge> edges;
    edges.reserve(dom.active_count() * offsets.size());

    for (NodeId u = 0; u < dom.active_count(); ++u) {
        const auto [i, j] = dom.cell(u);
        const Vec2 pu = dom.position(u);
        for (const auto& [di, dj] : offsets) {
            const auto v = dom.node(static_cast<std::ptrdiff_t>(i) + di,
                                    static_cast<std::ptrdiff_t>(j) + dj);
            if (!v) continue;
            const Vec2 pv = dom.position(*v);
            const Vec2 mid = 0.5 * (pu + pv);
            if (!dom.inside(mid)) continue;
            const double length = std::sqrt(rs.alpha.eval(mid).quadratic(pv - pu));
            const double drift = opts.include_beta ? rs.beta.segment_integral(pu, pv) : 0.0;
            const double w = length + drift;
            if (!(w > 0.0))
                throw RandersError("nonpositive weight " + std::to_string(w) + " on edge " +
                                   std::to_string(u) + " -> " + std::to_string(*v) +
                                   "; the one-form is too large for the metric");
            edges.push_back({u, *v, w});
        }
    }
    DirectedGraph g(dom.active_count(), std::move(edges));
    if (!g.strongly_connected())
        throw RandersError("active nodes of mask '" + dom.mask_name() +
                           "' are not connected under the stencil");
    return g;
}

namespace {

DistanceField shortest_paths(const DirectedGraph& g, NodeId source, Direction dir) {
    const std::size_t n = g.node_count();
    if (source >= n) throw RandersError("source node " + std::to_string(source) + " out of range");
    const bool forward = dir == Direction::forward;
    DistanceField field;
    field.source = source;
    field.direction = dir;
    field.values.assign(n, std::numeric_limits<double>::infinity());
    field.predecessor.assign(n, kNoNode);

    using Entry = std::pair<double, NodeId>;  // (distance, node): ties go to the lower index
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    field.values[source] = 0.0;
    queue.emplace(0.0, source);
    while (!queue.empty()) {
        const auto [du, u] = queue.top();
        queue.pop();
        if (du > field.values[u]) continue;
        const auto nb = g.neighbours(u, forward);
        const auto w = g.weights(u, forward);
        for (std::size_t k = 0; k < nb.size(); ++k) {
            const double alt = du + w[k];
            if (alt < field.values[nb[k]]) {
                field.values[nb[k]] = alt;
                field.predecessor[nb[k]] = u;
                queue.emplace(alt, nb[k]);
            }
        }
    }
    for (double v : field.values)
        if (!std::isfinite(v)) field.all_reachable = false;
    return field;
}

}  // namespace

DistanceField forward_distances(const DirectedGraph& g, NodeId source) {
    return shortest_paths(g, source, Direction::forward);
}

DistanceField backward_distances(const DirectedGraph& g, NodeId source) {
    return shortest_paths(g, source, Direction::backward);
}

std::vector<NodeId> extract_path(const DistanceField& field, NodeId target) {
    if (target >= field.values.size() || !std::isfinite(field.values[target])) return {};
    std::vector<NodeId> path{target};
    while (path.back() != field.source) path.push_back(field.predecessor[path.back()]);
    if (field.direction == Direction::forward) std::reverse(path.begin(), path.end());
    return path;
}

}  // namespace quasimetric::randers
