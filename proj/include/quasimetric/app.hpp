#pragma once

// Command-line frontend. Every subcommand produces a RunReport; the report
// is printed (JSON or CSV) and, with --output DIR, written to DIR together
// with any tables and distance fields the command produced.

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "quasimetric/io.hpp"

namespace quasimetric::app {

inline constexpr const char* kToolName = "qmtool";
inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { kPass = 0, kCheckFailure = 1, kUsageError = 2 };

struct Check {
    std::string name;
    double value = 0.0;
    std::optional<double> expected;
    double residual = 0.0;
    double tolerance = 0.0;
    bool asserted = true;  // reported-only checks never fail a run
    bool passed = true;
};

struct Artifact {
    std::string filename;
    std::string contents;
};

struct RunReport {
    std::string command;
    io::Json scenario = io::Json::object();
    std::vector<Check> checks;
    io::Json details = io::Json::object();
    std::vector<Artifact> artifacts;
    std::optional<double> elapsed_seconds;  // only with --timings

    /// Adds a check; names must be unique within a report.
    Check& add(Check c);
    /// Asserted check that passes when residual <= tolerance.
    Check& assert_within(std::string name, double value, std::optional<double> expected,
                         double residual, double tolerance);
    Check& report_only(std::string name, double value, std::optional<double> expected = {},
                       double residual = 0.0);

    bool passed() const;
};

io::Json report_json(const RunReport& r);
std::string checks_csv(const RunReport& r);

enum class Format { json, csv };

/// Writes report.json and every artifact into output_dir (created if
/// needed), then prints the report to out in the requested format.
void emit_report(const RunReport& r, Format format, const std::optional<std::filesystem::path>& output_dir,
                 std::ostream& out);

struct RandersRunOptions {
    std::optional<int> stencil;
    std::optional<std::size_t> resolution;
    unsigned threads = 1;
    bool timings = false;  // wall-clock figures break byte-identical reports
};

/// Runs a grid scenario (see README for the configuration keys).
RunReport run_randers_scenario(const io::Json& config, const RandersRunOptions& opts = {});

/// Builtin scenarios: "square", "annulus" and "w3".
io::Json demo_config(const std::string& name);

/// Parses arguments (without the program name) and runs the command.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace quasimetric::app
