#pragma once

// Randers distances F = alpha + beta on masked 2D grids.
//
// The domain is sampled on a regular grid; every active node is joined to
// the active nodes reachable through a fixed stencil of lattice offsets. An
// edge u -> v costs the alpha-length of the segment plus the line integral of
// beta along it, and distances are single-source shortest paths on the
// resulting directed graph.

#include <algorithm>
#include <array>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace quasimetric::randers {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

/// Symmetric 2x2 matrix [[xx, xy], [xy, yy]].
struct SymMat2 {
    double xx = 1.0;
    double xy = 0.0;
    double yy = 1.0;

    double det() const { return xx * yy - xy * xy; }
    bool positive_definite() const { return xx > 0.0 && det() > 0.0; }
    /// v^T A v
    double quadratic(Vec2 v) const { return xx * v.x * v.x + 2.0 * xy * v.x * v.y + yy * v.y * v.y; }
    SymMat2 inverse() const {
        const double d = det();
        return {yy / d, -xy / d, xx / d};
    }
};

using NodeId = std::size_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

class RandersError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Box {
    double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
};

using MaskPredicate = std::function<bool(Vec2)>;

/// Regular grid over a box, restricted to the nodes where the mask holds.
class GridDomain {
public:
    GridDomain(Box box, std::size_t nx, std::size_t ny, MaskPredicate mask, std::string mask_name);

    static GridDomain rectangle(Box box, std::size_t nx, std::size_t ny);
    /// r_in <= |p - center| <= r_out.
    static GridDomain annulus(Box box, std::size_t nx, std::size_t ny, Vec2 center, double r_in,
                              double r_out);

    const Box& box() const noexcept { return box_; }
    std::size_t nx() const noexcept { return nx_; }
    std::size_t ny() const noexcept { return ny_; }
    double hx() const noexcept { return hx_; }
    double hy() const noexcept { return hy_; }
    /// Smaller of the two spacings.
    double h() const noexcept { return std::min(hx_, hy_); }
    const std::string& mask_name() const noexcept { return mask_name_; }

    bool inside(Vec2 p) const { return mask_(p); }
    Vec2 coord(std::size_t i, std::size_t j) const;

    std::size_t active_count() const noexcept { return cells_.size(); }
    std::optional<NodeId> node(std::ptrdiff_t i, std::ptrdiff_t j) const;
    std::pair<std::size_t, std::size_t> cell(NodeId n) const { return cells_[n]; }
    Vec2 position(NodeId n) const { return coord(cells_[n].first, cells_[n].second); }

    /// Active node at the grid point nearest to p, if any.
    std::optional<NodeId> nearest(Vec2 p) const;

private:
    Box box_;
    std::size_t nx_, ny_;
    double hx_, hy_;
    MaskPredicate mask_;
    std::string mask_name_;
    std::vector<NodeId> index_;  // nx*ny, kNoNode when inactive
    std::vector<std::pair<std::size_t, std::size_t>> cells_;
};

/// x -> a_ij(x).
struct MetricField {
    std::function<SymMat2(Vec2)> eval;
    std::string name;

    static MetricField euclidean();
    static MetricField diagonal(double a1, double a2);
};

/// beta = df, with an optional analytic gradient.
struct Potential {
    std::function<double(Vec2)> f;
    std::function<Vec2(Vec2)> gradient;
};

/// beta = b_1 dx + b_2 dy.
struct Components {
    std::function<Vec2(Vec2)> b;
};

class OneForm {
public:
    static OneForm zero();
    static OneForm potential(std::function<double(Vec2)> f, std::function<Vec2(Vec2)> gradient = {},
                             std::string name = "potential");
    static OneForm components(std::function<Vec2(Vec2)> b, std::string name = "components");

    bool is_potential() const { return std::holds_alternative<Potential>(repr_); }
    const Potential* as_potential() const { return std::get_if<Potential>(&repr_); }
    const Components* as_components() const { return std::get_if<Components>(&repr_); }
    const std::string& name() const noexcept { return name_; }

    /// (b_1, b_2) at p; a potential without an analytic gradient is
    /// differentiated by central differences with step `step`.
    Vec2 covector(Vec2 p, double step = 1e-6) const;

    /// Integral of beta along the straight segment u -> v: exact for a
    /// potential, midpoint rule for components.
    double segment_integral(Vec2 u, Vec2 v) const;

private:
    OneForm(std::variant<Potential, Components> repr, std::string name)
        : repr_(std::move(repr)), name_(std::move(name)) {}

    std::variant<Potential, Components> repr_;
    std::string name_;
};

// Builtin catalog used by scenario files.
//   metric:   "euclidean", "diag(a1,a2)"
//   one-form: "zero", "potential:linear(cx,cy)", "potential:radial(k)",
//             "dtheta(lambda)" (components of lambda * dtheta)
MetricField parse_metric(const std::string& spec);
OneForm parse_one_form(const std::string& spec);
OneForm linear_potential(double cx, double cy);
OneForm radial_potential(double k);
OneForm dtheta(double lambda);

struct RandersStructure {
    GridDomain domain;
    MetricField alpha;
    OneForm beta;
};

struct PositivityCheck {
    bool positive = true;
    double sup_norm = 0.0;  // sup over active nodes of |b|_alpha
    NodeId worst_node = kNoNode;
};

/// sqrt(a^{ij} b_i b_j) < 1 - margin at every active node. Throws
/// RandersError if alpha is not positive definite at some node.
PositivityCheck check_positivity(const RandersStructure& rs, double margin = 1e-6);

/// Max |d1 b2 - d2 b1| over nodes whose four axis neighbours are active,
/// by central differences. Zero for a potential.
double check_closedness(const OneForm& beta, const GridDomain& domain);

enum class Stencil { eight = 8, sixteen = 16 };
Stencil stencil_from_int(int k);
/// Lattice offsets with max(|di|,|dj|) <= 1 (eight) or <= 2 and gcd 1 (sixteen).
std::vector<std::array<int, 2>> stencil_offsets(Stencil s);

/// Compressed adjacency with both edge directions stored.
class DirectedGraph {
public:
    struct Edge {
        NodeId from;
        NodeId to;
        double weight;
    };

    DirectedGraph(std::size_t node_count, std::vector<Edge> edges);

    std::size_t node_count() const noexcept { return out_offsets_.size() - 1; }
    std::size_t edge_count() const noexcept { return out_targets_.size(); }

    /// Edges leaving u (forward = true) or entering u (forward = false).
    std::span<const NodeId> neighbours(NodeId u, bool forward = true) const;
    std::span<const double> weights(NodeId u, bool forward = true) const;

    /// Weight of u -> v, if that edge exists.
    std::optional<double> weight(NodeId u, NodeId v) const;

    bool strongly_connected() const;

private:
    std::vector<std::size_t> out_offsets_, in_offsets_;
    std::vector<NodeId> out_targets_, in_sources_;
    std::vector<double> out_weights_, in_weights_;
};

struct GraphOptions {
    Stencil stencil = Stencil::sixteen;
    bool include_beta = true;  // false gives the graph of alpha alone
};

/// Edge u -> v is kept when v and the segment midpoint are inside the mask;
/// weight = alpha-length (midpoint rule) + integral of beta. Throws
/// RandersError on a nonpositive weight or a disconnected active set.
DirectedGraph build_graph(const RandersStructure& rs, const GraphOptions& opts = {});

enum class Direction { forward, backward };

struct DistanceField {
    NodeId source = 0;
    Direction direction = Direction::forward;
    std::vector<double> values;
    std::vector<NodeId> predecessor;
    bool all_reachable = true;
};

/// Dijkstra from source; ties are broken by ascending node index.
DistanceField forward_distances(const DirectedGraph& g, NodeId source);
/// Distances *to* source: values[y] = d(y, source), on reversed edges.
DistanceField backward_distances(const DirectedGraph& g, NodeId source);

/// Node sequence source ... target along the predecessor tree.
std::vector<NodeId> extract_path(const DistanceField& field, NodeId target);

struct NodePair {
    NodeId from;
    NodeId to;
};

struct DecompositionCheck {
    double max_residual = 0.0;
    NodePair worst{0, 0};
    std::size_t pairs = 0;
};

/// max |d_F(x,y) - d_alpha(x,y) - (f(y) - f(x))| over the pairs. Requires a
/// potential one-form.
DecompositionCheck check_randers_decomposition(const RandersStructure& rs,
                                               std::span<const NodePair> pairs,
                                               const GraphOptions& opts = {},
                                               unsigned threads = 1);

struct GridWeightSamples {
    NodeId basepoint = 0;
    std::vector<NodeId> nodes;
    std::vector<double> recovered;  // d_F(a,x) - d_F(x,a)
    std::vector<double> expected;   // 2 (f(x) - f(a))
    double max_residual = 0.0;
};

GridWeightSamples recover_grid_weight(const RandersStructure& rs, NodeId basepoint,
                                      std::span<const NodeId> samples,
                                      const GraphOptions& opts = {});

struct PerimeterDefect {
    std::array<NodeId, 3> triple{};
    double forward_perimeter = 0.0;   // d(x,y) + d(y,z) + d(z,x)
    double backward_perimeter = 0.0;  // d(x,z) + d(z,y) + d(y,x)
    double defect = 0.0;
};

PerimeterDefect perimeter_defect(const DirectedGraph& g, std::array<NodeId, 3> triple);

struct BusemannMayerEstimate {
    std::vector<double> radii;     // effective t per sample
    std::vector<double> forward;   // d_F(p, p + t v) / t
    std::vector<double> reverse;   // d_F(p, p - t v) / t
    double smallest_t = 0.0;       // forward quotient at the smallest radius
    double value = 0.0;            // Richardson extrapolate of F(p, v)
    double reverse_value = 0.0;    // Richardson extrapolate of F(p, -v)
    double symmetric_part = 0.0;   // (F(p,v) + F(p,-v)) / 2
    double beta_part = 0.0;        // (F(p,v) - F(p,-v)) / 2
};

/// Estimates F(p, v) from d_F(p, p + t v) / t at t = k h for each multiplier
/// k (default 4, 8, 16); the extrapolate uses the two smallest radii.
BusemannMayerEstimate busemann_mayer_estimate(const RandersStructure& rs, const DirectedGraph& g,
                                              NodeId p, Vec2 v,
                                              std::span<const double> multipliers = {});

}  // namespace quasimetric::randers
