#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <regex>

#include "quasimetric/app.hpp"
#include "quasimetric/randers.hpp"
#include "quasimetric/weight.hpp"

namespace quasimetric::app {

using io::Json;
using namespace randers;

namespace {

[[noreturn]] void config_error(const std::string& where, const std::string& msg) {
    throw io::ParseError("scenario: " + where + ": " + msg);
}

double number(const Json& j, const std::string& where) {
    if (!j.is_number()) config_error(where, "expected a number");
    return j.get<double>();
}

double number_or(const Json& cfg, const char* key, double fallback) {
    return cfg.contains(key) ? number(cfg[key], key) : fallback;
}

GridDomain parse_domain(const Json& cfg, const RandersRunOptions& opts) {
    if (!cfg.contains("domain")) config_error("domain", "missing");
    const Json& d = cfg["domain"];
    Box box;
    if (d.contains("box")) {
        const Json& b = d["box"];
        if (!b.is_array() || b.size() != 4) config_error("domain.box", "expected [x_min,x_max,y_min,y_max]");
        box = {number(b[0], "domain.box"), number(b[1], "domain.box"), number(b[2], "domain.box"),
               number(b[3], "domain.box")};
    }
    std::size_t nx = 101, ny = 101;
    if (d.contains("resolution")) {
        const Json& r = d["resolution"];
        if (r.is_number_unsigned()) {
            nx = ny = r.get<std::size_t>();
        } else if (r.is_array() && r.size() == 2 && r[0].is_number_unsigned() &&
                   r[1].is_number_unsigned()) {
            nx = r[0].get<std::size_t>();
            ny = r[1].get<std::size_t>();
        } else {
            config_error("domain.resolution", "expected N or [Nx,Ny]");
        }
    }
    if (opts.resolution) nx = ny = *opts.resolution;
    if (nx < 3 || ny < 3 || nx > 4001 || ny > 4001)
        config_error("domain.resolution", "must be within [3, 4001]");

    const std::string mask = d.value("mask", std::string("rectangle"));
    if (mask == "rectangle") return GridDomain::rectangle(box, nx, ny);
    static const std::regex annulus_re(R"(^annulus\(\s*([^,\s]+)\s*,\s*([^)\s]+)\s*\)$)");
    std::smatch m;
    if (std::regex_match(mask, m, annulus_re)) {
        try {
            return GridDomain::annulus(box, nx, ny, {0.0, 0.0}, std::stod(m[1].str()),
                                       std::stod(m[2].str()));
        } catch (const std::invalid_argument&) {
            config_error("domain.mask", "bad annulus radii");
        }
    }
    config_error("domain.mask", "unknown mask '" + mask + "'");
}

Vec2 parse_point(const Json& j, const std::string& where) {
    if (j.is_array() && j.size() == 2) return {number(j[0], where), number(j[1], where)};
    if (j.is_object() && j.contains("r") && j.contains("deg")) {
        const double r = number(j["r"], where), deg = number(j["deg"], where);
        const double t = deg * std::numbers::pi / 180.0;
        return {r * std::cos(t), r * std::sin(t)};
    }
    config_error(where, "expected [x,y] or {\"r\":..,\"deg\":..}");
}

NodeId snap(const GridDomain& dom, const Json& j, const std::string& where) {
    const Vec2 p = parse_point(j, where);
    const auto n = dom.nearest(p);
    if (!n) config_error(where, "point is not near an active grid node");
    return *n;
}

Json node_json(const GridDomain& dom, NodeId n) {
    const auto [i, j] = dom.cell(n);
    const Vec2 p = dom.position(n);
    Json out;
    out["node"] = n;
    out["i"] = i;
    out["j"] = j;
    out["x"] = p.x;
    out["y"] = p.y;
    return out;
}

// Portable sampling: raw mt19937_64 output reduced modulo n.
std::vector<NodeId> sample_nodes(std::mt19937_64& rng, std::size_t count, std::size_t n) {
    std::vector<NodeId> out(count);
    for (auto& v : out) v = static_cast<NodeId>(rng() % n);
    return out;
}

}  // namespace

RunReport run_randers_scenario(const Json& config, const RandersRunOptions& opts) {
    if (!config.is_object()) config_error("<root>", "expected an object");
    RunReport report;
    report.command = "randers";
    report.scenario = config;

    GridDomain domain = parse_domain(config, opts);
    int stencil_k = config.contains("stencil") ? static_cast<int>(number(config["stencil"], "stencil")) : 16;
    if (opts.stencil) stencil_k = *opts.stencil;
    GraphOptions gopts;
    try {
        gopts.stencil = stencil_from_int(stencil_k);
    } catch (const RandersError& e) {
        config_error("stencil", e.what());
    }
    MetricField alpha;
    OneForm beta = OneForm::zero();
    try {
        alpha = parse_metric(config.value("metric", std::string("euclidean")));
        beta = parse_one_form(config.value("one_form", std::string("zero")));
    } catch (const RandersError& e) {
        config_error("metric/one_form", e.what());
    }
    const RandersStructure rs{domain, alpha, beta};
    const double h = domain.h();

    Json& details = report.details;
    details["grid"] = {{"nx", domain.nx()},           {"ny", domain.ny()},
                       {"h", h},                      {"active_nodes", domain.active_count()},
                       {"mask", domain.mask_name()},  {"stencil", stencil_k},
                       {"metric", alpha.name},        {"one_form", beta.name()}};

    const PositivityCheck pos = check_positivity(rs, number_or(config, "positivity_margin", 1e-6));
    report.assert_within("positivity", pos.sup_norm, std::nullopt,
                         std::max(0.0, pos.sup_norm - (1.0 - number_or(config, "positivity_margin", 1e-6))),
                         0.0)
        .passed = pos.positive;
    details["positivity"] = {{"sup_norm", pos.sup_norm}, {"worst", node_json(domain, pos.worst_node)}};
    if (!pos.positive) return report;

    report.report_only("closedness", check_closedness(beta, domain));

    const DirectedGraph graph = build_graph(rs, gopts);
    details["graph"] = {{"edges", graph.edge_count()}};

    if (config.contains("sources")) {
        std::size_t k = 0;
        Json sources = Json::array();
        for (const auto& s : config["sources"]) {
            const NodeId n = snap(domain, s, "sources[" + std::to_string(k) + "]");
            const DistanceField f = forward_distances(graph, n);
            report.artifacts.push_back({"field_" + std::to_string(k) + ".csv",
                                        io::format_distance_field_csv(domain, f)});
            Json e = node_json(domain, n);
            e["all_reachable"] = f.all_reachable;
            sources.push_back(e);
            ++k;
        }
        details["sources"] = sources;
    }

    if (config.contains("euclidean_benchmark")) {
        const Json& b = config["euclidean_benchmark"];
        if (alpha.name != "euclidean") config_error("euclidean_benchmark", "needs the euclidean metric");
        const NodeId src = snap(domain, b.value("source", Json::array({0.5, 0.5})), "euclidean_benchmark.source");
        const double min_h = number_or(b, "min_distance_h", 10.0);
        const double tol = number_or(b, "max_rel_error", 0.03);
        const RandersStructure flat{domain, MetricField::euclidean(), OneForm::zero()};
        const auto t0 = std::chrono::steady_clock::now();
        const DirectedGraph g0 = build_graph(flat, gopts);
        const DistanceField f = forward_distances(g0, src);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const Vec2 ps = domain.position(src);
        double worst = 0.0;
        for (NodeId n = 0; n < domain.active_count(); ++n) {
            const Vec2 q = domain.position(n) - ps;
            const double exact = std::hypot(q.x, q.y);
            if (exact < min_h * h) continue;
            worst = std::max(worst, std::abs(f.values[n] - exact) / exact);
        }
        report.assert_within("euclidean_max_rel_error", worst, 0.0, worst, tol);
        if (opts.timings) details["euclidean_benchmark_seconds"] = secs;
    }

    if (config.contains("decomposition")) {
        const Json& d = config["decomposition"];
        std::vector<NodePair> pairs;
        if (d.contains("pairs")) {
            std::size_t k = 0;
            for (const auto& p : d["pairs"]) {
                const std::string w = "decomposition.pairs[" + std::to_string(k++) + "]";
                if (!p.is_array() || p.size() != 2) config_error(w, "expected [from, to]");
                pairs.push_back({snap(domain, p[0], w), snap(domain, p[1], w)});
            }
        }
        if (d.contains("sample")) {
            std::mt19937_64 rng(static_cast<std::uint64_t>(number_or(d, "seed", 1)));
            const auto count = static_cast<std::size_t>(number(d["sample"], "decomposition.sample"));
            // Sources are drawn from a small pool so each one serves several pairs.
            const auto pool = sample_nodes(rng, std::max<std::size_t>(1, count / 10), domain.active_count());
            for (std::size_t k = 0; k < count; ++k)
                pairs.push_back({pool[rng() % pool.size()], static_cast<NodeId>(rng() % domain.active_count())});
        }
        const DecompositionCheck dc = check_randers_decomposition(rs, pairs, gopts, opts.threads);
        report.assert_within("decomposition_residual", dc.max_residual, 0.0, dc.max_residual,
                             number_or(d, "tol", 1e-12));
        details["decomposition"] = {{"pairs", dc.pairs},
                                    {"worst_from", node_json(domain, dc.worst.from)},
                                    {"worst_to", node_json(domain, dc.worst.to)}};
    }

    if (config.contains("grid_weight")) {
        const Json& gw = config["grid_weight"];
        const NodeId a = snap(domain, gw.value("basepoint", Json::array({0.0, 0.0})), "grid_weight.basepoint");
        std::vector<NodeId> samples;
        std::size_t k = 0;
        for (const auto& s : gw.value("samples", Json::array()))
            samples.push_back(snap(domain, s, "grid_weight.samples[" + std::to_string(k++) + "]"));
        const GridWeightSamples ws = recover_grid_weight(rs, a, samples, gopts);
        report.assert_within("grid_weight_residual", ws.max_residual, 0.0, ws.max_residual,
                             number_or(gw, "tol", 1e-12));
        Json rows = Json::array();
        for (std::size_t i = 0; i < ws.nodes.size(); ++i) {
            Json e = node_json(domain, ws.nodes[i]);
            e["recovered"] = ws.recovered[i];
            e["expected"] = ws.expected[i];
            rows.push_back(e);
        }
        details["grid_weight"] = rows;
    }

    if (config.contains("duality_samples")) {
        std::mt19937_64 rng(7);
        const auto count = static_cast<std::size_t>(number(config["duality_samples"], "duality_samples"));
        const auto xs = sample_nodes(rng, count, domain.active_count());
        const auto ys = sample_nodes(rng, count, domain.active_count());
        double worst = 0.0;
        for (std::size_t k = 0; k < count; ++k) {
            const DistanceField back = backward_distances(graph, xs[k]);
            const DistanceField fwd = forward_distances(graph, ys[k]);
            worst = std::max(worst, std::abs(back.values[ys[k]] - fwd.values[xs[k]]));
        }
        report.assert_within("backward_forward_duality", worst, 0.0, worst, 1e-12);
    }

    if (config.contains("triples")) {
        std::string table = "name,x_node,y_node,z_node,forward_perimeter,backward_perimeter,defect,expected\n";
        std::size_t k = 0;
        for (const auto& t : config["triples"]) {
            const std::string where = "triples[" + std::to_string(k) + "]";
            const std::string name = t.value("name", "triple_" + std::to_string(k));
            if (!t.contains("points") || t["points"].size() != 3) config_error(where, "needs three points");
            std::array<NodeId, 3> tri{};
            for (std::size_t i = 0; i < 3; ++i) tri[i] = snap(domain, t["points"][i], where);
            const PerimeterDefect pd = perimeter_defect(graph, tri);
            std::optional<double> expected;
            double tol = 0.0;
            if (t.contains("expected")) {
                expected = number(t["expected"], where + ".expected");
                tol = number_or(t, "abs_tol", 1e-12);
            } else if (beta.is_potential()) {
                expected = 0.0;
                tol = number_or(t, "abs_tol", 1e-12);
            }
            const std::string check = "perimeter_defect:" + name;
            if (expected)
                report.assert_within(check, pd.defect, expected, std::abs(pd.defect - *expected), tol);
            else
                report.report_only(check, pd.defect);
            table += name + "," + std::to_string(tri[0]) + "," + std::to_string(tri[1]) + "," +
                     std::to_string(tri[2]) + "," + io::format_double(pd.forward_perimeter) + "," +
                     io::format_double(pd.backward_perimeter) + "," + io::format_double(pd.defect) +
                     "," + (expected ? io::format_double(*expected) : "") + "\n";
            ++k;
        }
        report.artifacts.push_back({"triples.csv", table});
    }

    if (config.contains("busemann_mayer")) {
        std::string table = "name,x,y,vx,vy,F,F_smallest_t,F0_part,beta_part\n";
        std::size_t k = 0;
        for (const auto& b : config["busemann_mayer"]) {
            const std::string where = "busemann_mayer[" + std::to_string(k) + "]";
            const std::string name = b.value("name", "bm_" + std::to_string(k));
            const NodeId p = snap(domain, b.value("point", Json()), where + ".point");
            const Vec2 v = parse_point(b.value("direction", Json()), where + ".direction");
            const BusemannMayerEstimate est = busemann_mayer_estimate(rs, graph, p, v);
            const double values[3] = {est.value, est.symmetric_part, est.beta_part};
            static const char* parts[3] = {"F", "F0_part", "beta_part"};
            if (b.contains("expected")) {
                const Json& ex = b["expected"];
                if (!ex.is_array() || ex.size() != 3) config_error(where, "expected [F, F0, beta]");
                const double rel = number_or(b, "rel_tol", 0.05);
                // Zero targets get an absolute band of rel_tol.
                for (int i = 0; i < 3; ++i) {
                    const double e = number(ex[i], where + ".expected");
                    report.assert_within("busemann_mayer:" + name + ":" + parts[i], values[i], e,
                                         std::abs(values[i] - e), rel * std::max(1.0, std::abs(e)));
                }
            } else {
                for (int i = 0; i < 3; ++i)
                    report.report_only("busemann_mayer:" + name + ":" + parts[i], values[i]);
            }
            const Vec2 pp = domain.position(p);
            table += name + "," + io::format_double(pp.x) + "," + io::format_double(pp.y) + "," +
                     io::format_double(v.x) + "," + io::format_double(v.y) + "," +
                     io::format_double(est.value) + "," + io::format_double(est.smallest_t) + "," +
                     io::format_double(est.symmetric_part) + "," + io::format_double(est.beta_part) + "\n";
            ++k;
        }
        report.artifacts.push_back({"busemann_mayer.csv", table});
    }
    return report;
}

Json demo_config(const std::string& name) {
    if (name == "square") {
        return Json::parse(R"cfg({
  "name": "unit square, beta = 0.5 dx",
  "domain": {"box": [0, 1, 0, 1], "resolution": 101, "mask": "rectangle"},
  "stencil": 16,
  "metric": "euclidean",
  "one_form": "potential:linear(0.5,0)",
  "sources": [[0.5, 0.5], [0, 0]],
  "euclidean_benchmark": {"source": [0.5, 0.5], "min_distance_h": 10, "max_rel_error": 0.03},
  "decomposition": {"pairs": [[[0, 0], [1, 0]], [[1, 0], [0, 0]]], "sample": 100, "seed": 1, "tol": 1e-12},
  "grid_weight": {"basepoint": [0, 0], "samples": [[1, 0], [0.5, 0.5], [0.25, 1], [0, 0]], "tol": 1e-12},
  "duality_samples": 10,
  "triples": [
    {"name": "corners", "points": [[0, 0], [1, 0], [0.5, 1]]},
    {"name": "interior", "points": [[0.2, 0.3], [0.7, 0.4], [0.4, 0.9]]}
  ],
  "busemann_mayer": [
    {"name": "east", "point": [0.5, 0.5], "direction": [1, 0], "expected": [1.5, 1.0, 0.5], "rel_tol": 0.05},
    {"name": "north", "point": [0.5, 0.5], "direction": [0, 1], "expected": [1.0, 1.0, 0.0], "rel_tol": 0.05},
    {"name": "west", "point": [0.5, 0.5], "direction": [-1, 0], "expected": [0.5, 1.0, -0.5], "rel_tol": 0.05}
  ]
})cfg");
    }
    if (name == "annulus") {
        const double two_pi = 2.0 * std::numbers::pi;
        Json cfg = Json::parse(R"cfg({
  "name": "annulus 1.5 <= r <= 3, beta = 0.5 dtheta",
  "domain": {"box": [-3, 3, -3, 3], "resolution": 241, "mask": "annulus(1.5,3)"},
  "stencil": 16,
  "metric": "euclidean",
  "one_form": "dtheta(0.5)",
  "triples": [
    {"name": "winding", "points": [{"r": 2.25, "deg": 0}, {"r": 2.25, "deg": 120}, {"r": 2.25, "deg": 240}]},
    {"name": "clustered", "points": [{"r": 2.25, "deg": 0}, {"r": 2.25, "deg": 15}, {"r": 2.25, "deg": 30}]}
  ]
})cfg");
        cfg["triples"][0]["expected"] = two_pi;
        cfg["triples"][0]["abs_tol"] = 0.05 * two_pi;
        cfg["triples"][1]["expected"] = 0.0;
        cfg["triples"][1]["abs_tol"] = 0.02 * two_pi;
        return cfg;
    }
    throw io::ParseError("unknown demo '" + name + "' (expected square, annulus or w3)");
}

}  // namespace quasimetric::app
