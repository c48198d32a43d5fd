#include <cmath>
#include <regex>
#include <string>

#include "quasimetric/randers.hpp"

namespace quasimetric::randers {

GridDomain::GridDomain(Box box, std::size_t nx, std::size_t ny, MaskPredicate mask,
                       std::string mask_name)
    : box_(box), nx_(nx), ny_(ny), mask_(std::move(mask)), mask_name_(std::move(mask_name)) {
    if (nx_ < 2 || ny_ < 2) throw RandersError("grid needs at least 2 nodes per axis");
    if (!(box_.x_max > box_.x_min) || !(box_.y_max > box_.y_min))
        throw RandersError("empty bounding box");
    hx_ = (box_.x_max - box_.x_min) / static_cast<double>(nx_ - 1);
    hy_ = (box_.y_max - box_.y_min) / static_cast<double>(ny_ - 1);

    index_.assign(nx_ * ny_, kNoNode);
    for (std::size_t j = 0; j < ny_; ++j)
        for (std::size_t i = 0; i < nx_; ++i)
            if (mask_(coord(i, j))) {
                index_[j * nx_ + i] = cells_.size();
                cells_.emplace_back(i, j);
            }
    if (cells_.empty()) throw RandersError("mask '" + mask_name_ + "' selects no grid node");
}

GridDomain GridDomain::rectangle(Box box, std::size_t nx, std::size_t ny) {
    return GridDomain(box, nx, ny, [](Vec2) { return true; }, "rectangle");
}

GridDomain GridDomain::annulus(Box box, std::size_t nx, std::size_t ny, Vec2 center, double r_in,
                               double r_out) {
    if (!(r_in >= 0.0 && r_out > r_in)) throw RandersError("annulus needs 0 <= r_in < r_out");
    auto mask = [center, r_in, r_out](Vec2 p) {
        const double r = std::hypot(p.x - center.x, p.y - center.y);
        return r >= r_in && r <= r_out;
    };
    return GridDomain(box, nx, ny, mask,
                      "annulus(" + std::to_string(r_in) + "," + std::to_string(r_out) + ")");
}

Vec2 GridDomain::coord(std::size_t i, std::size_t j) const {
    return {box_.x_min + static_cast<double>(i) * hx_, box_.y_min + static_cast<double>(j) * hy_};
}

std::optional<NodeId> GridDomain::node(std::ptrdiff_t i, std::ptrdiff_t j) const {
    if (i < 0 || j < 0 || i >= static_cast<std::ptrdiff_t>(nx_) ||
        j >= static_cast<std::ptrdiff_t>(ny_))
        return std::nullopt;
    const NodeId n = index_[static_cast<std::size_t>(j) * nx_ + static_cast<std::size_t>(i)];
    if (n == kNoNode) return std::nullopt;
    return n;
}

std::optional<NodeId> GridDomain::nearest(Vec2 p) const {
    const double fi = std::round((p.x - box_.x_min) / hx_);
    const double fj = std::round((p.y - box_.y_min) / hy_);
    if (!std::isfinite(fi) || !std::isfinite(fj)) return std::nullopt;
    return node(static_cast<std::ptrdiff_t>(fi), static_cast<std::ptrdiff_t>(fj));
}

MetricField MetricField::euclidean() {
    return {[](Vec2) { return SymMat2{1.0, 0.0, 1.0}; }, "euclidean"};
}

MetricField MetricField::diagonal(double a1, double a2) {
    if (!(a1 > 0.0 && a2 > 0.0)) throw RandersError("diag metric needs positive entries");
    return {[a1, a2](Vec2) { return SymMat2{a1, 0.0, a2}; },
            "diag(" + std::to_string(a1) + "," + std::to_string(a2) + ")"};
}

OneForm OneForm::zero() {
    return potential([](Vec2) { return 0.0; }, [](Vec2) { return Vec2{}; }, "zero");
}

OneForm OneForm::potential(std::function<double(Vec2)> f, std::function<Vec2(Vec2)> gradient,
                           std::string name) {
    return OneForm(Potential{std::move(f), std::move(gradient)}, std::move(name));
}

OneForm OneForm::components(std::function<Vec2(Vec2)> b, std::string name) {
    return OneForm(Components{std::move(b)}, std::move(name));
}

Vec2 OneForm::covector(Vec2 p, double step) const {
    if (const auto* c = as_components()) return c->b(p);
    const auto& pot = std::get<Potential>(repr_);
    if (pot.gradient) return pot.gradient(p);
    const double hx = step * std::max(1.0, std::abs(p.x));
    const double hy = step * std::max(1.0, std::abs(p.y));
    return {(pot.f({p.x + hx, p.y}) - pot.f({p.x - hx, p.y})) / (2.0 * hx),
            (pot.f({p.x, p.y + hy}) - pot.f({p.x, p.y - hy})) / (2.0 * hy)};
}

double OneForm::segment_integral(Vec2 u, Vec2 v) const {
    if (const auto* pot = as_potential()) return pot->f(v) - pot->f(u);
    const Vec2 m = 0.5 * (u + v);
    return dot(as_components()->b(m), v - u);
}

OneForm linear_potential(double cx, double cy) {
    return OneForm::potential([cx, cy](Vec2 p) { return cx * p.x + cy * p.y; },
                              [cx, cy](Vec2) { return Vec2{cx, cy}; },
                              "potential:linear(" + std::to_string(cx) + "," + std::to_string(cy) +
                                  ")");
}

OneForm radial_potential(double k) {
    return OneForm::potential(
        [k](Vec2 p) { return k * std::hypot(p.x, p.y); },
        [k](Vec2 p) {
            const double r = std::hypot(p.x, p.y);
            // One-sided choice at the cone tip; |gradient| <= k either way.
            return r == 0.0 ? Vec2{} : Vec2{k * p.x / r, k * p.y / r};
        },
        "potential:radial(" + std::to_string(k) + ")");
}

OneForm dtheta(double lambda) {
    return OneForm::components(
        [lambda](Vec2 p) {
            const double r2 = p.x * p.x + p.y * p.y;
            if (r2 == 0.0) throw RandersError("dtheta is undefined at the origin");
            return Vec2{-lambda * p.y / r2, lambda * p.x / r2};
        },
        "dtheta(" + std::to_string(lambda) + ")");
}

namespace {

struct Call {
    std::string name;
    std::vector<double> args;
};

Call parse_call(const std::string& text) {
    static const std::regex call_re(R"(^\s*([A-Za-z_]+)\s*(?:\(([^)]*)\))?\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, call_re)) throw RandersError("cannot parse '" + text + "'");
    Call c{m[1].str(), {}};
    const std::string args = m[2].str();
    std::size_t pos = 0;
    while (pos < args.size()) {
        std::size_t comma = args.find(',', pos);
        if (comma == std::string::npos) comma = args.size();
        const std::string tok = args.substr(pos, comma - pos);
        try {
            std::size_t used = 0;
            c.args.push_back(std::stod(tok, &used));
            if (tok.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw RandersError("bad numeric argument '" + tok + "' in '" + text + "'");
        }
        pos = comma + 1;
    }
    return c;
}

void expect_args(const Call& c, std::size_t n, const std::string& text) {
    if (c.args.size() != n)
        throw RandersError("'" + c.name + "' takes " + std::to_string(n) + " argument(s): '" +
                           text + "'");
}

}  // namespace

MetricField parse_metric(const std::string& spec) {
    const Call c = parse_call(spec);
    if (c.name == "euclidean") {
        expect_args(c, 0, spec);
        return MetricField::euclidean();
    }
    if (c.name == "diag") {
        expect_args(c, 2, spec);
        return MetricField::diagonal(c.args[0], c.args[1]);
    }
    throw RandersError("unknown metric '" + spec + "'");
}

OneForm parse_one_form(const std::string& spec) {
    static const std::string kPotential = "potential:";
    static const std::string kComponents = "components:";
    if (spec.rfind(kPotential, 0) == 0) {
        const std::string body = spec.substr(kPotential.size());
        const Call c = parse_call(body);
        if (c.name == "linear") {
            expect_args(c, 2, spec);
            return linear_potential(c.args[0], c.args[1]);
        }
        if (c.name == "radial") {
            expect_args(c, 1, spec);
            return radial_potential(c.args[0]);
        }
        throw RandersError("unknown potential '" + spec + "'");
    }
    const std::string body =
        spec.rfind(kComponents, 0) == 0 ? spec.substr(kComponents.size()) : spec;
    const Call c = parse_call(body);
    if (c.name == "zero" || c.name == "none") {
        expect_args(c, 0, spec);
        return OneForm::zero();
    }
    if (c.name == "dtheta") {
        expect_args(c, 1, spec);
        return dtheta(c.args[0]);
    }
    throw RandersError("unknown one-form '" + spec + "'");
}

PositivityCheck check_positivity(const RandersStructure& rs, double margin) {
    PositivityCheck out;
    for (NodeId n = 0; n < rs.domain.active_count(); ++n) {
        const Vec2 p = rs.domain.position(n);
        const SymMat2 a = rs.alpha.eval(p);
        if (!a.positive_definite())
            throw RandersError("metric is not positive definite at node " + std::to_string(n));
        const Vec2 b = rs.beta.covector(p);
        const SymMat2 inv = a.inverse();
        const double norm = std::sqrt(inv.quadratic(b));
        if (!std::isfinite(norm))
            throw RandersError("one-form is not finite at node " + std::to_string(n));
        if (norm > out.sup_norm || out.worst_node == kNoNode) {
            out.sup_norm = norm;
            out.worst_node = n;
        }
    }
    out.positive = out.sup_norm < 1.0 - margin;
    return out;
}

double check_closedness(const OneForm& beta, const GridDomain& domain) {
    if (beta.is_potential()) return 0.0;
    const double hx = domain.hx(), hy = domain.hy();
    double worst = 0.0;
    for (NodeId n = 0; n < domain.active_count(); ++n) {
        const auto [i, j] = domain.cell(n);
        const auto ii = static_cast<std::ptrdiff_t>(i), jj = static_cast<std::ptrdiff_t>(j);
        if (!domain.node(ii + 1, jj) || !domain.node(ii - 1, jj) || !domain.node(ii, jj + 1) ||
            !domain.node(ii, jj - 1))
            continue;
        const Vec2 p = domain.position(n);
        const double d1b2 =
            (beta.covector({p.x + hx, p.y}).y - beta.covector({p.x - hx, p.y}).y) / (2.0 * hx);
        const double d2b1 =
            (beta.covector({p.x, p.y + hy}).x - beta.covector({p.x, p.y - hy}).x) / (2.0 * hy);
        worst = std::max(worst, std::abs(d1b2 - d2b1));
    }
    return worst;
}

}  // namespace quasimetric::randers
