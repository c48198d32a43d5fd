#include "quasimetric/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace quasimetric::io {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = line.find(sep, pos);
        out.push_back(trim(line.substr(pos, next == std::string_view::npos ? next : next - pos)));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

[[noreturn]] void csv_error(const std::string& origin, std::size_t line, std::size_t field,
                            const std::string& msg) {
    throw ParseError(origin + ":" + std::to_string(line) + ":" + std::to_string(field) + ": " + msg);
}

double parse_number(std::string_view tok, const std::string& origin, std::size_t line,
                    std::size_t field) {
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    if (!tok.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (tok.empty() || ec != std::errc() || ptr != last)
        csv_error(origin, line, field, "expected a number, got '" + std::string(tok) + "'");
    if (!std::isfinite(v)) csv_error(origin, line, field, "non-finite value");
    return v;
}

}  // namespace

SpaceFile parse_space_csv(std::string_view text, const std::string& origin) {
    std::vector<std::pair<std::size_t, std::string_view>> lines;
    std::size_t lineno = 0, pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        const std::string_view line =
            text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        ++lineno;
        if (!trim(line).empty()) lines.emplace_back(lineno, line);
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    if (lines.empty()) throw ParseError(origin + ": empty matrix file");

    const auto header = split(lines[0].second, ',');
    if (header[0] != "labels")
        csv_error(origin, lines[0].first, 1, "first cell must be 'labels'");
    SpaceFile out;
    for (std::size_t k = 1; k < header.size(); ++k) {
        if (header[k].empty()) csv_error(origin, lines[0].first, k + 1, "empty label");
        out.labels.emplace_back(header[k]);
    }
    const std::size_t n = out.labels.size();
    if (lines.size() - 1 != n)
        throw ParseError(origin + ": " + std::to_string(n) + " labels but " +
                         std::to_string(lines.size() - 1) + " matrix rows");

    out.matrix = Matrix(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto [ln, text_line] = lines[i + 1];
        const auto cells = split(text_line, ',');
        if (cells.size() != n + 1)
            csv_error(origin, ln, cells.size(),
                      "expected " + std::to_string(n + 1) + " fields, got " +
                          std::to_string(cells.size()));
        if (cells[0] != out.labels[i])
            csv_error(origin, ln, 1,
                      "row label '" + std::string(cells[0]) + "' does not match column label '" +
                          out.labels[i] + "'");
        for (std::size_t j = 0; j < n; ++j)
            out.matrix(i, j) = parse_number(cells[j + 1], origin, ln, j + 2);
    }
    return out;
}

namespace {

std::vector<double> number_array(const Json& j, const std::string& where) {
    if (!j.is_array()) throw ParseError(where + ": expected an array of numbers");
    std::vector<double> out;
    for (std::size_t k = 0; k < j.size(); ++k) {
        if (!j[k].is_number())
            throw ParseError(where + "[" + std::to_string(k) + "]: expected a number");
        const double v = j[k].get<double>();
        if (!std::isfinite(v)) throw ParseError(where + "[" + std::to_string(k) + "]: non-finite");
        out.push_back(v);
    }
    return out;
}

Json parse_json(std::string_view text, const std::string& origin) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(origin + ": " + e.what());
    }
}

}  // namespace

SpaceFile parse_space_json(std::string_view text, const std::string& origin) {
    const Json j = parse_json(text, origin);
    if (!j.is_object() || !j.contains("matrix"))
        throw ParseError(origin + ": expected an object with a 'matrix' field");
    const Json& rows = j["matrix"];
    if (!rows.is_array()) throw ParseError(origin + ": matrix: expected an array of rows");
    std::vector<std::vector<double>> data;
    for (std::size_t i = 0; i < rows.size(); ++i)
        data.push_back(number_array(rows[i], origin + ": matrix[" + std::to_string(i) + "]"));

    SpaceFile out;
    try {
        out.matrix = Matrix::from_rows(data);
    } catch (const StructuralError& e) {
        throw ParseError(origin + ": " + e.what());
    }
    if (j.contains("labels")) {
        const Json& labels = j["labels"];
        if (!labels.is_array()) throw ParseError(origin + ": labels: expected an array");
        for (std::size_t k = 0; k < labels.size(); ++k) {
            if (!labels[k].is_string())
                throw ParseError(origin + ": labels[" + std::to_string(k) + "]: expected a string");
            out.labels.push_back(labels[k].get<std::string>());
        }
        if (out.labels.size() != out.matrix.size())
            throw ParseError(origin + ": " + std::to_string(out.labels.size()) + " labels for a " +
                             std::to_string(out.matrix.size()) + "x" +
                             std::to_string(out.matrix.size()) + " matrix");
    } else {
        out.labels = default_labels(out.matrix.size());
    }
    for (const char* key : {"weight", "f"}) {
        if (!j.contains(key)) continue;
        auto v = number_array(j[key], origin + ": " + key);
        if (v.size() != out.matrix.size())
            throw ParseError(origin + ": " + key + ": expected " +
                             std::to_string(out.matrix.size()) + " entries");
        (std::string(key) == "weight" ? out.weight : out.function) = std::move(v);
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path.string() + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(path.string() + ": cannot write file");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error(path.string() + ": write failed");
}

SpaceFile read_space(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    if (path.extension() == ".csv") return parse_space_csv(text, path.string());
    return parse_space_json(text, path.string());
}

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string format_space_csv(const std::vector<std::string>& labels, const Matrix& m) {
    std::string out = "labels";
    for (const auto& l : labels) out += "," + l;
    out += "\n";
    for (std::size_t i = 0; i < m.size(); ++i) {
        out += labels[i];
        for (std::size_t j = 0; j < m.size(); ++j) out += "," + format_double(m(i, j));
        out += "\n";
    }
    return out;
}

Json space_to_json(const std::vector<std::string>& labels, const Matrix& m,
                   const std::optional<std::vector<double>>& weight) {
    Json j;
    j["labels"] = labels;
    j["matrix"] = m.rows();
    if (weight) j["weight"] = *weight;
    return j;
}

std::vector<PointSubset> parse_subsets(std::string_view text, const FiniteQuasiMetric& space,
                                       const std::string& origin) {
    Json j = parse_json(text, origin);
    if (j.is_object() && j.contains("subsets")) j = j["subsets"];
    if (!j.is_array()) throw ParseError(origin + ": expected a list of subsets");
    std::vector<PointSubset> out;
    for (std::size_t k = 0; k < j.size(); ++k) {
        const std::string where = origin + ": subsets[" + std::to_string(k) + "]";
        if (!j[k].is_array()) throw ParseError(where + ": expected an array");
        PointSubset s;
        for (const auto& e : j[k]) {
            if (e.is_string()) {
                s.push_back(space.index_of(e.get<std::string>()));
            } else if (e.is_number_unsigned()) {
                const auto idx = e.get<std::size_t>();
                if (idx >= space.size()) throw ParseError(where + ": index out of range");
                s.push_back(idx);
            } else {
                throw ParseError(where + ": entries must be labels or indices");
            }
        }
        try {
            require_subset(space.matrix(), s);
        } catch (const StructuralError& e) {
            throw ParseError(where + ": " + e.what());
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<PointSubset> read_subsets(const std::filesystem::path& path,
                                      const FiniteQuasiMetric& space) {
    return parse_subsets(read_file(path), space, path.string());
}

std::string format_distance_field_csv(const randers::GridDomain& domain,
                                      const randers::DistanceField& field) {
    std::string out = "i,j,x,y,dist\n";
    for (randers::NodeId n = 0; n < domain.active_count(); ++n) {
        const auto [i, j] = domain.cell(n);
        const auto p = domain.position(n);
        out += std::to_string(i) + "," + std::to_string(j) + "," + format_double(p.x) + "," +
               format_double(p.y) + "," + format_double(field.values[n]) + "\n";
    }
    return out;
}

Json report_to_json(const ValidationReport& r, const std::vector<std::string>& labels) {
    Json j;
    j["passed"] = r.passed;
    j["max_residual"] = r.max_residual;
    Json violations = Json::array();
    for (const auto& v : r.violations) {
        Json e;
        e["axiom"] = v.axiom;
        e["witness"] = v.witness;
        if (!labels.empty()) {
            Json names = Json::array();
            for (auto idx : v.witness) names.push_back(idx < labels.size() ? labels[idx] : "?");
            e["witness_labels"] = names;
        }
        e["residual"] = v.residual;
        e["count"] = v.count;
        violations.push_back(e);
    }
    j["violations"] = violations;
    return j;
}

}  // namespace quasimetric::io
