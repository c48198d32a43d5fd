#include <stdexcept>

#include "quasimetric/app.hpp"

namespace quasimetric::app {

Check& RunReport::add(Check c) {
    for (const auto& existing : checks)
        if (existing.name == c.name) throw std::logic_error("duplicate check '" + c.name + "'");
    checks.push_back(std::move(c));
    return checks.back();
}

Check& RunReport::assert_within(std::string name, double value, std::optional<double> expected,
                                double residual, double tolerance) {
    // NaN residuals fail.
    return add({std::move(name), value, expected, residual, tolerance, true, residual <= tolerance});
}

Check& RunReport::report_only(std::string name, double value, std::optional<double> expected,
                              double residual) {
    return add({std::move(name), value, expected, residual, 0.0, false, true});
}

bool RunReport::passed() const {
    for (const auto& c : checks)
        if (c.asserted && !c.passed) return false;
    return true;
}

io::Json report_json(const RunReport& r) {
    io::Json j;
    j["tool"] = kToolName;
    j["version"] = kVersion;
    j["command"] = r.command;
    j["passed"] = r.passed();
    j["scenario"] = r.scenario;
    io::Json checks = io::Json::array();
    for (const auto& c : r.checks) {
        io::Json e;
        e["name"] = c.name;
        e["value"] = c.value;
        e["expected"] = c.expected ? io::Json(*c.expected) : io::Json(nullptr);
        e["residual"] = c.residual;
        e["tolerance"] = c.tolerance;
        e["asserted"] = c.asserted;
        e["passed"] = c.passed;
        checks.push_back(e);
    }
    j["checks"] = checks;
    j["details"] = r.details;
    if (r.elapsed_seconds) j["elapsed_seconds"] = *r.elapsed_seconds;
    return j;
}

std::string checks_csv(const RunReport& r) {
    std::string out = "name,value,expected,residual,tolerance,asserted,passed\n";
    for (const auto& c : r.checks) {
        out += c.name + "," + io::format_double(c.value) + "," +
               (c.expected ? io::format_double(*c.expected) : "") + "," +
               io::format_double(c.residual) + "," + io::format_double(c.tolerance) + "," +
               (c.asserted ? "true" : "false") + "," + (c.passed ? "true" : "false") + "\n";
    }
    return out;
}

void emit_report(const RunReport& r, Format format,
                 const std::optional<std::filesystem::path>& output_dir, std::ostream& out) {
    const std::string json = report_json(r).dump(2) + "\n";
    if (output_dir) {
        std::error_code ec;
        std::filesystem::create_directories(*output_dir, ec);
        if (ec) throw std::runtime_error(output_dir->string() + ": " + ec.message());
        io::write_file(*output_dir / "report.json", json);
        for (const auto& a : r.artifacts) io::write_file(*output_dir / a.filename, a.contents);
    }
    out << (format == Format::json ? json : checks_csv(r));
}

}  // namespace quasimetric::app
