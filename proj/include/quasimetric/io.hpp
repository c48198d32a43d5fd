#pragma once

// File formats.
//
// Matrix CSV:   labels,<l1>,...,<ln>
//               <l1>,<d(1,1)>,...,<d(1,n)>
//               ...
// Space JSON:   { "labels": [...], "matrix": [[...]], "weight": [...] }
//               ("weight" optional; "f" may replace it for graph spaces)
// Subsets JSON: [ ["x"], ["y", "z"], ... ]  or  { "subsets": [...] }
//               (entries are labels or integer indices)

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "quasimetric/core.hpp"
#include "quasimetric/hausdorff.hpp"
#include "quasimetric/randers.hpp"

namespace quasimetric::io {

using Json = nlohmann::ordered_json;

/// Parse failure with a location: "<origin>:<line>:<field>: message" for CSV,
/// "<origin>: <json path>: message" for JSON.
class ParseError : public StructuralError {
public:
    using StructuralError::StructuralError;
};

struct SpaceFile {
    std::vector<std::string> labels;
    Matrix matrix;
    std::optional<std::vector<double>> weight;
    std::optional<std::vector<double>> function;  // "f": graph-of-function height
};

SpaceFile parse_space_csv(std::string_view text, const std::string& origin = "<csv>");
SpaceFile parse_space_json(std::string_view text, const std::string& origin = "<json>");
/// Dispatches on the extension (.csv, otherwise JSON).
SpaceFile read_space(const std::filesystem::path& path);

std::string format_space_csv(const std::vector<std::string>& labels, const Matrix& m);
Json space_to_json(const std::vector<std::string>& labels, const Matrix& m,
                   const std::optional<std::vector<double>>& weight = std::nullopt);

std::vector<PointSubset> parse_subsets(std::string_view text, const FiniteQuasiMetric& space,
                                       const std::string& origin = "<subsets>");
std::vector<PointSubset> read_subsets(const std::filesystem::path& path,
                                      const FiniteQuasiMetric& space);

/// Long-format distance field: i,j,x,y,dist (one row per active node).
std::string format_distance_field_csv(const randers::GridDomain& domain,
                                      const randers::DistanceField& field);

Json report_to_json(const ValidationReport& r, const std::vector<std::string>& labels = {});

std::string read_file(const std::filesystem::path& path);
/// Throws std::runtime_error when the file cannot be written.
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Shortest decimal text that round-trips, as used in CSV output.
std::string format_double(double v);

}  // namespace quasimetric::io
