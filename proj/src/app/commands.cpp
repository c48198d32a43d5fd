#include <algorithm>
#include <chrono>
#include <cmath>

#include <CLI11.hpp>

#include "quasimetric/app.hpp"
#include "quasimetric/hausdorff.hpp"
#include "quasimetric/weight.hpp"

namespace quasimetric::app {

using io::Json;

namespace {

struct CommonOptions {
    double tol = 1e-9;
    std::string format = "json";
    std::string output;
    bool weak_separation = false;
    unsigned threads = 1;
    bool timings = false;

    ValidationOptions validation() const { return {tol, weak_separation, threads}; }
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--tol", o.tol, "Relative tolerance (scaled by max(1, largest entry))")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--format", o.format, "Printed report format")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--output", o.output, "Directory for report.json and tables");
    cmd->add_flag("--weak-separation", o.weak_separation,
                  "Accept zero off-diagonal distances unless both directions vanish");
    cmd->add_option("--threads", o.threads, "Worker threads")->check(CLI::Range(1u, 256u));
    cmd->add_flag("--timings", o.timings, "Include wall-clock time (reports are no longer byte-stable)");
}

Json labelled(const std::vector<std::string>& labels, const std::vector<double>& values) {
    Json j = Json::object();
    for (std::size_t i = 0; i < labels.size(); ++i) j[labels[i]] = values[i];
    return j;
}

Json labels_of(const std::vector<std::string>& labels, std::initializer_list<std::size_t> idx) {
    Json j = Json::array();
    for (auto i : idx) j.push_back(labels.at(i));
    return j;
}

Json scenario_echo(const std::string& input, const CommonOptions& o) {
    return {{"input", input},
            {"tol", o.tol},
            {"weak_separation", o.weak_separation}};
}

double worst_violation(const ValidationReport& r) {
    double w = 0.0;
    for (const auto& v : r.violations) w = std::max(w, v.residual);
    return w;
}

void add_validation_check(RunReport& report, const std::string& name, const ValidationReport& v,
                          double tol) {
    report.add({name, v.max_residual, std::nullopt, worst_violation(v), tol, true, v.passed});
}

RunReport cmd_validate(const io::SpaceFile& f, const CommonOptions& o) {
    RunReport report;
    report.command = "validate";
    const ValidationReport v = validate_quasi_metric(f.matrix, o.validation());
    add_validation_check(report, "quasi_metric_axioms", v, effective_tolerance(f.matrix, o.tol));
    report.details = io::report_to_json(v, f.labels);
    report.details["points"] = f.matrix.size();
    return report;
}

RunReport cmd_weigh(const io::SpaceFile& f, const std::string& basepoint, const CommonOptions& o) {
    RunReport report;
    report.command = "weigh";
    const double tol = effective_tolerance(f.matrix, o.tol);
    const ValidationReport v = validate_quasi_metric(f.matrix, o.validation());
    add_validation_check(report, "quasi_metric_axioms", v, tol);
    report.details["validation"] = io::report_to_json(v, f.labels);
    if (!v.passed) return report;

    const auto q = FiniteQuasiMetric::unchecked(f.labels, f.matrix);
    const std::size_t a = basepoint.empty() ? 0 : q.index_of(basepoint);
    const PerimeterCheck pc = check_perimeter_identity(f.matrix, o.tol);
    report.assert_within("perimeter_identity", pc.max_residual, 0.0, pc.max_residual, tol);
    const auto& t = pc.worst_triple;
    report.details["perimeter"] = {{"holds", pc.holds},
                                   {"max_residual", pc.max_residual},
                                   {"worst_triple", labels_of(f.labels, {t[0], t[1], t[2]})}};
    if (!pc.holds) return report;

    const GeneralizedWeight gw = recover_weight(f.matrix, a, o.tol);
    const std::vector<double> w = normalize_weight(gw);
    const double r = weightability_residual(f.matrix, w);
    report.assert_within("weightability", r, 0.0, r, tol);
    report.details["basepoint"] = f.labels[a];
    report.details["generalized_weight"] = labelled(f.labels, gw.values);
    report.details["weight"] = labelled(f.labels, w);
    report.artifacts.push_back(
        {"weighted_space.json", io::space_to_json(f.labels, f.matrix, w).dump(2) + "\n"});
    return report;
}

void add_weighted_checks(RunReport& report, const Matrix& d, const std::vector<double>& w,
                         const CommonOptions& o) {
    const ValidationReport v = validate_weighted(d, w, o.validation());
    add_validation_check(report, "weighted_axioms", v, effective_tolerance(d, o.tol));
    const ValidationReport e = check_embedding(d, w, effective_tolerance(d, o.tol));
    add_validation_check(report, "embedding_isometry", e, effective_tolerance(d, o.tol));
    report.details["weighted_axioms"] = io::report_to_json(v);
    report.details["embedding"] = io::report_to_json(e);
}

RunReport cmd_compose(const io::SpaceFile& f, const CommonOptions& o) {
    RunReport report;
    report.command = "compose";
    const ValidationReport mv = validate_metric(f.matrix, o.validation());
    add_validation_check(report, "metric_axioms", mv, effective_tolerance(f.matrix, o.tol));
    if (!mv.passed) {
        report.details["metric"] = io::report_to_json(mv, f.labels);
        return report;
    }
    if (!f.weight && !f.function)
        throw io::ParseError("compose input needs a 'weight' or an 'f' array");
    const auto rho = FiniteMetric::unchecked(f.labels, f.matrix);
    std::optional<WeightedQuasiMetric> qw;
    try {
        qw = f.weight ? compose(rho, *f.weight, o.validation())
                      : graph_space(rho, *f.function, o.validation());
        report.assert_within("lipschitz_bound", 0.0, std::nullopt, 0.0, 0.0);
    } catch (const LipschitzError& e) {
        const auto [i, j] = e.check().worst_pair;
        report.assert_within("lipschitz_bound", e.check().max_excess, std::nullopt,
                             std::max(0.0, e.check().max_excess), 0.0)
            .passed = false;
        report.details["lipschitz_worst_pair"] = labels_of(f.labels, {i, j});
        return report;
    }
    add_weighted_checks(report, qw->matrix(), qw->weight(), o);
    const Matrix back = symmetrize(qw->matrix());
    double sym = 0.0;
    for (std::size_t i = 0; i < back.size(); ++i)
        for (std::size_t j = 0; j < back.size(); ++j) sym = std::max(sym, std::abs(back(i, j) - f.matrix(i, j)));
    report.assert_within("symmetrization_roundtrip", sym, 0.0, sym, effective_tolerance(f.matrix, o.tol));
    const Json space = io::space_to_json(f.labels, qw->matrix(), qw->weight());
    report.details["space"] = space;
    report.artifacts.push_back({"space.json", space.dump(2) + "\n"});
    report.artifacts.push_back({"space.csv", io::format_space_csv(f.labels, qw->matrix())});
    return report;
}

RunReport cmd_embed_check(const io::SpaceFile& f, const CommonOptions& o) {
    if (!f.weight) throw io::ParseError("embed-check input needs a 'weight' array");
    RunReport report;
    report.command = "embed-check";
    add_weighted_checks(report, f.matrix, *f.weight, o);
    return report;
}

RunReport cmd_hausdorff(const io::SpaceFile& f, const std::vector<PointSubset>& subsets,
                        const CommonOptions& o) {
    RunReport report;
    report.command = "hausdorff";
    const double tol = effective_tolerance(f.matrix, o.tol);
    const ValidationReport v = validate_quasi_metric(f.matrix, o.validation());
    add_validation_check(report, "quasi_metric_axioms", v, tol);
    if (!v.passed) return report;

    // The weighted-formula columns need a weight: the file's, or a recovered one.
    std::optional<std::vector<double>> w = f.weight;
    if (!w && check_perimeter_identity(f.matrix, o.tol).holds)
        w = normalize_weight(basepoint_weight(f.matrix, 0));
    std::optional<WeightedQuasiMetric> qw;
    if (w) {
        try {
            qw = WeightedQuasiMetric::create(FiniteQuasiMetric::unchecked(f.labels, f.matrix), *w,
                                             o.validation());
        } catch (const AxiomError&) {
            qw.reset();
        }
    }
    const FiniteMetric rho = symmetrize(FiniteQuasiMetric::unchecked(f.labels, f.matrix));

    auto name = [&](const PointSubset& s) {
        std::string out = "{";
        for (std::size_t k = 0; k < s.size(); ++k) out += (k ? " " : "") + f.labels[s[k]];
        return out + "}";
    };
    std::string table =
        "A,B,forward,backward,max,rho_hausdorff,forward_rho,residual_forward_rho,residual_symmetric_rho\n";
    std::size_t exceed_forward = 0, exceed_symmetric = 0;
    for (const auto& a : subsets)
        for (const auto& b : subsets) {
            if (&a == &b) continue;
            const double fw = qh_forward(f.matrix, a, b);
            const double bw = qh_backward(f.matrix, a, b);
            const double mx = qh_max(f.matrix, a, b);
            const double hr = hausdorff_metric(rho, a, b);
            const double fr = qh_forward(rho.matrix(), a, b);
            if (fw > fr + tol) ++exceed_forward;
            if (fw > hr + tol) ++exceed_symmetric;
            table += name(a) + "," + name(b) + "," + io::format_double(fw) + "," + io::format_double(bw) +
                     "," + io::format_double(mx) + "," + io::format_double(hr) + "," + io::format_double(fr);
            if (qw) {
                const auto r = weighted_formula_residual(*qw, a, b);
                table += "," + io::format_double(r.forward_residual) + "," +
                         io::format_double(r.symmetric_residual);
            } else {
                table += ",,";
            }
            table += "\n";
        }
    report.report_only("forward_exceeds_forward_rho_count", static_cast<double>(exceed_forward));
    report.report_only("forward_exceeds_rho_hausdorff_count", static_cast<double>(exceed_symmetric));

    double e_worst = 0.0;
    for (std::size_t x = 0; x < f.matrix.size(); ++x)
        for (std::size_t y = 0; y < f.matrix.size(); ++y)
            e_worst = std::max(e_worst, std::abs(e_embedding_distance(f.matrix, x, y) - f.matrix(x, y)));
    report.assert_within("e_embedding_isometry", e_worst, 0.0, e_worst, tol);

    report.details["weighted"] = qw.has_value();
    report.artifacts.push_back({"hausdorff.csv", table});
    return report;
}

const char* kW3Csv =
    "labels,x,y,z\n"
    "x,0,3,4.5\n"
    "y,1,0,2.5\n"
    "z,3.5,3.5,0\n";

RunReport demo_w3(const CommonOptions& o) {
    RunReport report;
    report.command = "demo";
    report.scenario = {{"name", "w3"}, {"matrix", kW3Csv}};
    const io::SpaceFile w3 = io::parse_space_csv(kW3Csv, "w3");

    auto absorb = [&](const std::string& prefix, RunReport sub) {
        for (auto c : sub.checks) {
            c.name = prefix + ":" + c.name;
            report.add(std::move(c));
        }
        report.details[prefix] = sub.details;
        for (auto& a : sub.artifacts) report.artifacts.push_back({prefix + "_" + a.filename, a.contents});
    };
    absorb("validate", cmd_validate(w3, o));
    absorb("weigh", cmd_weigh(w3, "x", o));

    io::SpaceFile rho;
    rho.labels = w3.labels;
    rho.matrix = Matrix::from_rows({{0, 2, 4}, {2, 0, 3}, {4, 3, 0}});
    rho.weight = std::vector<double>{0, 2, 1};
    RunReport composed = cmd_compose(rho, o);
    double diff = 0.0;
    const auto& m = composed.details["space"]["matrix"];
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) diff = std::max(diff, std::abs(m[i][j].get<double>() - w3.matrix(i, j)));
    absorb("compose", std::move(composed));
    report.assert_within("compose:reproduces_w3", diff, 0.0, diff, effective_tolerance(w3.matrix, o.tol));

    const auto space = FiniteQuasiMetric::unchecked(w3.labels, w3.matrix);
    absorb("hausdorff", cmd_hausdorff(w3, io::parse_subsets(R"([["x"], ["y", "z"], ["x", "y", "z"]])", space), o));
    return report;
}

void finalize(RunReport& report, const CommonOptions& o,
              std::chrono::steady_clock::time_point start) {
    if (o.timings)
        report.elapsed_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App cli{"Quasi-metric and Randers distance toolkit", kToolName};
    cli.set_version_flag("--version", kVersion);
    cli.require_subcommand(1);

    CommonOptions common;
    std::string input, basepoint, subsets, config, demo_name;
    int stencil = 0;
    std::size_t resolution = 0;

    auto* validate = cli.add_subcommand("validate", "Check the quasi-metric axioms of a matrix");
    validate->add_option("--input", input, "Matrix file (.csv or .json)")->required();
    auto* weigh = cli.add_subcommand("weigh", "Detect weightability and recover the weight");
    weigh->add_option("--input", input, "Matrix file (.csv or .json)")->required();
    weigh->add_option("--basepoint", basepoint, "Label or index of the basepoint");
    auto* comp = cli.add_subcommand("compose", "Build d = rho + (w(y) - w(x))/2 from a metric and a weight");
    comp->add_option("--input", input, "JSON with 'matrix' (metric) and 'weight' or 'f'")->required();
    auto* embed = cli.add_subcommand("embed-check", "Verify the bundle embedding of a weighted space");
    embed->add_option("--input", input, "Weighted space JSON")->required();
    auto* haus = cli.add_subcommand("hausdorff", "Quasi-Hausdorff distances between subsets");
    haus->add_option("--input", input, "Matrix file (.csv or .json)")->required();
    haus->add_option("--subsets", subsets, "JSON list of subsets")->required();
    auto* rand = cli.add_subcommand("randers", "Run a Randers grid scenario");
    rand->add_option("--config", config, "Scenario JSON")->required();
    auto* demo = cli.add_subcommand("demo", "Run a builtin scenario");
    demo->add_option("name", demo_name, "square | annulus | w3")->required()
        ->check(CLI::IsMember({"square", "annulus", "w3"}));
    for (auto* r : {rand, demo}) {
        r->add_option("--stencil", stencil, "Neighbour stencil")->check(CLI::IsMember({8, 16}));
        r->add_option("--resolution", resolution, "Grid nodes per axis")->check(CLI::Range(3, 4001));
    }
    for (auto* c : {validate, weigh, comp, embed, haus, rand, demo}) add_common(c, common);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        cli.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e, out, err);
        return code == 0 ? kPass : kUsageError;
    }

    const auto start = std::chrono::steady_clock::now();
    RunReport report;
    try {
        RandersRunOptions ropts;
        if (stencil) ropts.stencil = stencil;
        if (resolution) ropts.resolution = resolution;
        ropts.threads = common.threads;
        ropts.timings = common.timings;

        if (validate->parsed()) {
            report = cmd_validate(io::read_space(input), common);
        } else if (weigh->parsed()) {
            report = cmd_weigh(io::read_space(input), basepoint, common);
        } else if (comp->parsed()) {
            report = cmd_compose(io::read_space(input), common);
        } else if (embed->parsed()) {
            report = cmd_embed_check(io::read_space(input), common);
        } else if (haus->parsed()) {
            const io::SpaceFile f = io::read_space(input);
            const auto space = FiniteQuasiMetric::unchecked(f.labels, f.matrix);
            report = cmd_hausdorff(f, io::read_subsets(subsets, space), common);
        } else if (rand->parsed()) {
            const std::string text = io::read_file(config);
            Json cfg;
            try {
                cfg = Json::parse(text);
            } catch (const nlohmann::json::parse_error& e) {
                throw io::ParseError(config + ": " + e.what());
            }
            report = run_randers_scenario(cfg, ropts);
        } else if (demo_name == "w3") {
            report = demo_w3(common);
        } else {
            report = run_randers_scenario(demo_config(demo_name), ropts);
            report.command = "demo";
        }
        if (!validate->parsed() && !demo->parsed() && !rand->parsed())
            report.scenario = scenario_echo(input, common);
    } catch (const StructuralError& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::runtime_error& e) {
        // Domain failures from the modules (nonpositive edges, axiom errors).
        err << "failed: " << e.what() << "\n";
        return kCheckFailure;
    }
    if (validate->parsed()) report.scenario = scenario_echo(input, common);
    finalize(report, common, start);

    try {
        emit_report(report, common.format == "csv" ? Format::csv : Format::json,
                    common.output.empty() ? std::nullopt
                                          : std::optional<std::filesystem::path>(common.output),
                    out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    }
    return report.passed() ? kPass : kCheckFailure;
}

}  // namespace quasimetric::app
