#include <gtest/gtest.h>

#include <filesystem>

#include "quasimetric/io.hpp"
#include "support.hpp"

using namespace quasimetric;
using namespace quasimetric::io;

namespace {

const char* kW3 = "labels,x,y,z\nx,0,3,4.5\ny,1,0,2.5\nz,3.5,3.5,0\n";

std::string error_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const ParseError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Csv, ParsesW3) {
    const auto f = parse_space_csv(kW3);
    EXPECT_EQ(f.labels, (std::vector<std::string>{"x", "y", "z"}));
    EXPECT_EQ(f.matrix, qmtest::w3());
    EXPECT_FALSE(f.weight.has_value());
}

TEST(Csv, ToleratesBlankLinesAndCarriageReturns) {
    const auto f = parse_space_csv("labels, a, b\r\n\r\na, 0, +1e0\r\nb,2 ,0\r\n");
    EXPECT_EQ(f.labels, (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(f.matrix, Matrix::from_rows({{0, 1}, {2, 0}}));
}

TEST(Csv, DiagnosticsNameLineAndField) {
    EXPECT_EQ(error_of([] { parse_space_csv("labels,x,y\nx,0,1\ny,abc,0\n", "m.csv"); }),
              "m.csv:3:2: expected a number, got 'abc'");
    EXPECT_EQ(error_of([] { parse_space_csv("labels,x,y\nx,0,1\ny,1\n", "m.csv"); }),
              "m.csv:3:2: expected 3 fields, got 2");
    EXPECT_EQ(error_of([] { parse_space_csv("labels,x,y\nx,0,1\nz,1,0\n", "m.csv"); }),
              "m.csv:3:1: row label 'z' does not match column label 'y'");
    EXPECT_EQ(error_of([] { parse_space_csv("name,x\nx,0\n", "m.csv"); }),
              "m.csv:1:1: first cell must be 'labels'");
    EXPECT_NE(error_of([] { parse_space_csv("labels,x,y\nx,0,1\n", "m.csv"); }), "");
    EXPECT_NE(error_of([] { parse_space_csv("labels,x\nx,nan\n", "m.csv"); }), "");
    EXPECT_NE(error_of([] { parse_space_csv(""); }), "");
}

TEST(Json, ParsesSpaceWithWeightAndFunction) {
    const auto f = parse_space_json(R"({"labels":["x","y","z"],"matrix":[[0,3,4.5],[1,0,2.5],[3.5,3.5,0]],"weight":[0,2,1]})");
    EXPECT_EQ(f.matrix, qmtest::w3());
    EXPECT_EQ(*f.weight, (std::vector<double>{0, 2, 1}));
    const auto g = parse_space_json(R"({"matrix":[[0,2],[2,0]],"f":[0,1]})");
    EXPECT_EQ(g.labels, default_labels(2));
    EXPECT_EQ(*g.function, (std::vector<double>{0, 1}));
}

TEST(Json, Errors) {
    EXPECT_THROW(parse_space_json("{"), ParseError);
    EXPECT_THROW(parse_space_json(R"({"m":[]})"), ParseError);
    EXPECT_THROW(parse_space_json(R"({"matrix":[[0,1],[1]]})"), ParseError);
    EXPECT_THROW(parse_space_json(R"({"matrix":[[0,"a"],[1,0]]})"), ParseError);
    EXPECT_THROW(parse_space_json(R"({"matrix":[[0,1],[1,0]],"labels":["a"]})"), ParseError);
    EXPECT_THROW(parse_space_json(R"({"matrix":[[0,1],[1,0]],"weight":[1]})"), ParseError);
}

TEST(RoundTrip, CsvAndJson) {
    qmtest::Rng rng(53);
    const Matrix d = qmtest::random_quasi_metric(rng, 6);
    const auto labels = default_labels(6);
    EXPECT_EQ(parse_space_csv(format_space_csv(labels, d)).matrix, d);
    const auto j = space_to_json(labels, d, std::vector<double>{1, 2, 3, 4, 5, 6});
    const auto back = parse_space_json(j.dump());
    EXPECT_EQ(back.matrix, d);
    EXPECT_EQ(back.labels, labels);
    EXPECT_EQ(back.weight->at(5), 6.0);
}

TEST(Format, ShortestRoundTrip) {
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(4.5), "4.5");
    EXPECT_EQ(format_double(1e-300), "1e-300");
    EXPECT_EQ(format_double(INFINITY), "inf");
    qmtest::Rng rng(59);
    for (int k = 0; k < 1000; ++k) {
        const double v = qmtest::uniform(rng, -1e6, 1e6);
        EXPECT_EQ(std::stod(format_double(v)), v);
    }
}

TEST(Subsets, LabelsIndicesAndErrors) {
    const auto q = FiniteQuasiMetric::create({"x", "y", "z"}, qmtest::w3());
    const auto s = parse_subsets(R"([["x"], ["y", 2]])", q);
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s[1], (PointSubset{1, 2}));
    EXPECT_EQ(parse_subsets(R"({"subsets": [[0]]})", q).size(), 1u);
    EXPECT_THROW(parse_subsets(R"([[]])", q), ParseError);
    EXPECT_THROW(parse_subsets(R"([["x","x"]])", q), ParseError);
    EXPECT_THROW(parse_subsets(R"([[7]])", q), ParseError);
    EXPECT_THROW(parse_subsets(R"([["w"]])", q), StructuralError);
    EXPECT_THROW(parse_subsets(R"([[1.5]])", q), ParseError);
}

TEST(Files, MissingFileIsParseError) {
    EXPECT_THROW(read_space("/nonexistent/space.csv"), ParseError);
}

TEST(Report, ValidationToJson) {
    ValidationReport r;
    r.flag("triangle", {0, 1, 2}, 8.0);
    r.passed = false;
    const Json j = report_to_json(r, {"x", "y", "z"});
    EXPECT_FALSE(j["passed"].get<bool>());
    EXPECT_EQ(j["violations"][0]["witness_labels"], Json({"x", "y", "z"}));
    EXPECT_EQ(j["violations"][0]["residual"].get<double>(), 8.0);
}

TEST(Field, OneRowPerActiveNode) {
    const auto dom = randers::GridDomain::annulus({-3, 3, -3, 3}, 21, 21, {0, 0}, 1.5, 3);
    randers::DistanceField f;
    f.values.assign(dom.active_count(), 1.0);
    const std::string csv = format_distance_field_csv(dom, f);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), static_cast<long>(dom.active_count() + 1));
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "i,j,x,y,dist");
}
