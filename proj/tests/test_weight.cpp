#include <gtest/gtest.h>

#include "quasimetric/weight.hpp"
#include "support.hpp"

using namespace quasimetric;
using qmtest::w3;
using qmtest::w3_rho;

namespace {

FiniteMetric rho3() { return FiniteMetric::create({"x", "y", "z"}, w3_rho()); }

}  // namespace

TEST(Perimeter, W3Holds) {
    const auto d = w3();
    EXPECT_DOUBLE_EQ(d(0, 1) + d(1, 2) + d(2, 0), 9.0);
    EXPECT_DOUBLE_EQ(d(0, 2) + d(2, 1) + d(1, 0), 9.0);
    const auto pc = check_perimeter_identity(d);
    EXPECT_TRUE(pc.holds);
    EXPECT_EQ(pc.max_residual, 0.0);
}

TEST(Perimeter, SymmetricHolds) {
    qmtest::Rng rng(1);
    const auto pc = check_perimeter_identity(qmtest::random_metric(rng, 9));
    EXPECT_TRUE(pc.holds);
    EXPECT_LE(pc.max_residual, 1e-13);
}

TEST(Perimeter, PerturbedW3Fails) {
    auto d = w3();
    d(0, 1) = 3.2;
    const auto pc = check_perimeter_identity(d);
    EXPECT_FALSE(pc.holds);
    EXPECT_NEAR(pc.max_residual, 0.2, 1e-12);
    EXPECT_EQ(pc.worst_triple, (std::array<std::size_t, 3>{0, 1, 2}));
}

TEST(Recover, W3Basepoints) {
    const auto gx = recover_weight(w3(), 0);
    EXPECT_EQ(gx.values, (std::vector<double>{0, 2, 1}));
    EXPECT_EQ(gx.basepoint, 0u);
    const auto gy = recover_weight(w3(), 1);
    EXPECT_EQ(gy.values, (std::vector<double>{-2, 0, -1}));
    EXPECT_EQ(normalize_weight(gy), (std::vector<double>{0, 2, 1}));
}

TEST(Recover, SymmetricGivesZero) {
    for (std::size_t a = 0; a < 3; ++a)
        EXPECT_EQ(recover_weight(w3_rho(), a).values, (std::vector<double>(3, 0.0)));
}

TEST(Recover, NotWeightableCarriesTriple) {
    auto d = w3();
    d(0, 1) = 3.2;
    try {
        recover_weight(d, 0);
        FAIL() << "expected NotWeightable";
    } catch (const NotWeightable& e) {
        EXPECT_EQ(e.check().worst_triple, (std::array<std::size_t, 3>{0, 1, 2}));
    }
    EXPECT_THROW(recover_weight(w3(), 3), StructuralError);
}

TEST(Normalize, Examples) {
    EXPECT_EQ(normalize_weight(std::vector<double>{-2, 0, -1}), (std::vector<double>{0, 2, 1}));
    EXPECT_EQ(normalize_weight(std::vector<double>{0, 0, 0}), (std::vector<double>{0, 0, 0}));
    EXPECT_EQ(normalize_weight(std::vector<double>{5, 7, 6}), (std::vector<double>{0, 2, 1}));
}

TEST(Compose, W3) {
    const auto qw = compose(rho3(), std::vector<double>{0, 2, 1});
    EXPECT_EQ(qw.matrix(), w3());
    EXPECT_EQ(qw.space().labels(), (std::vector<std::string>{"x", "y", "z"}));
    const auto [rho, w] = decompose(qw);
    EXPECT_EQ(rho.matrix(), w3_rho());
    EXPECT_EQ(w, (std::vector<double>{0, 2, 1}));
}

TEST(Compose, ConstantWeightGivesRho) {
    EXPECT_EQ(compose(rho3(), std::vector<double>{4, 4, 4}).matrix(), w3_rho());
}

TEST(Compose, LipschitzViolation) {
    const auto rho = FiniteMetric::create({"x", "y"}, Matrix::from_rows({{0, 1}, {1, 0}}));
    try {
        compose(rho, std::vector<double>{0, 4});
        FAIL() << "expected LipschitzError";
    } catch (const LipschitzError& e) {
        EXPECT_DOUBLE_EQ(e.check().max_excess, 1.0);
        EXPECT_EQ(e.check().worst_pair, (std::pair<std::size_t, std::size_t>{0, 1}));
    }
    EXPECT_THROW(compose(rho, std::vector<double>{0, -1}), StructuralError);
}

TEST(Compose, EqualityCaseNeedsWeakSeparation) {
    const auto rho = FiniteMetric::create({"x", "y"}, Matrix::from_rows({{0, 1}, {1, 0}}));
    EXPECT_THROW(compose(rho, std::vector<double>{0, 2}), LipschitzError);
    const auto qw = compose(rho, std::vector<double>{0, 2}, {1e-9, true, 1});
    EXPECT_EQ(qw.matrix()(1, 0), 0.0);
    EXPECT_EQ(qw.matrix()(0, 1), 2.0);
}

TEST(Bundle, Examples) {
    const auto rho = rho3();
    const auto a = bundle_distance(rho, {0, 1.0}, {1, 3.0});
    EXPECT_EQ(a.distance, 4.0);
    EXPECT_FALSE(a.generalized);
    EXPECT_EQ(bundle_distance(rho, {2, 1.5}, {2, 1.5}).distance, 0.0);
    const auto unit = FiniteMetric::create({"x", "y"}, Matrix::from_rows({{0, 1}, {1, 0}}));
    const auto neg = bundle_distance(unit, {0, 5.0}, {1, 0.0});
    EXPECT_EQ(neg.distance, -4.0);
    EXPECT_TRUE(neg.generalized);
    EXPECT_EQ(bundle_weight({0, 1.25}), 2.5);
    EXPECT_THROW(bundle_distance(unit, {0, -1.0}, {1, 0.0}), StructuralError);
}

TEST(GraphSpace, Examples) {
    const auto g = graph_space(rho3(), std::vector<double>{0, 1, 0.5});
    EXPECT_EQ(g.matrix(), w3());
    EXPECT_EQ(g.weight(), (std::vector<double>{0, 2, 1}));
    const auto flat = graph_space(rho3(), std::vector<double>{0, 0, 0});
    EXPECT_EQ(flat.matrix(), w3_rho());
    EXPECT_EQ(flat.weight(), (std::vector<double>{0, 0, 0}));
    const auto unit = FiniteMetric::create({"x", "y"}, Matrix::from_rows({{0, 1}, {1, 0}}));
    EXPECT_THROW(graph_space(unit, std::vector<double>{0, 3}), LipschitzError);
}

TEST(Embedding, Examples) {
    const auto r = check_embedding(w3(), std::vector<double>{0, 2, 1});
    EXPECT_TRUE(r.passed);
    EXPECT_EQ(r.max_residual, 0.0);
    EXPECT_TRUE(check_embedding(w3_rho(), std::vector<double>{0, 0, 0}).passed);

    const auto bad = check_embedding(w3(), std::vector<double>{0, 2.1, 1});
    ASSERT_FALSE(bad.passed);
    const Violation* v = bad.find("isometry");
    ASSERT_NE(v, nullptr);
    EXPECT_NEAR(v->residual, 0.05, 1e-12);
    EXPECT_TRUE(v->witness[0] == 1 || v->witness[1] == 1);
    EXPECT_EQ(v->count, 4u);
}

TEST(Validated, WeightedSpaceRejectsBadWeights) {
    const auto q = FiniteQuasiMetric::create({"x", "y", "z"}, w3());
    EXPECT_NO_THROW(WeightedQuasiMetric::create(q, {0, 2, 1}));
    EXPECT_NO_THROW(WeightedQuasiMetric::create(q, {3, 5, 4}));
    EXPECT_THROW(WeightedQuasiMetric::create(q, {0, 2, 1.5}), AxiomError);
    EXPECT_THROW(WeightedQuasiMetric::create(q, {-2, 0, -1}), AxiomError);
}

// Keystone: perimeter identity <=> recovery yields a valid weight, against an
// independent gradient test, on small rational spaces.
TEST(Properties, PerimeterEquivalenceSmallRational) {
    qmtest::Rng rng(5);
    int weightable = 0, not_weightable = 0;
    for (int trial = 0; trial < 4000; ++trial) {
        const std::size_t n = qmtest::pick(rng, 2, 5);
        Matrix d;
        if (trial % 2) {
            d = qmtest::random_grid_quasi_metric(rng, n, 12, 0.5);
        } else {
            Matrix rho = qmtest::random_grid_quasi_metric(rng, n, 12, 0.5);
            rho = symmetrize(rho);
            std::vector<double> w(n);
            for (auto& x : w) x = 0.25 * static_cast<double>(qmtest::pick(rng, 0, 4));
            d = qmtest::weighted_from(rho, w);
            if (!qmtest::brute_quasi_metric(d, 0.0)) continue;
        }
        const bool oracle = qmtest::brute_weightable(d, 1e-12);
        const bool perimeter = check_perimeter_identity(d).holds;
        EXPECT_EQ(perimeter, oracle);
        bool recovered = false;
        try {
            const auto w = normalize_weight(recover_weight(d, qmtest::pick(rng, 0, n - 1)));
            recovered = weightability_residual(d, w) <= 1e-9 &&
                        validate_weighted(d, w).passed;
        } catch (const NotWeightable&) {
        }
        EXPECT_EQ(recovered, perimeter);
        (oracle ? weightable : not_weightable)++;
    }
    EXPECT_GT(weightable, 500);
    EXPECT_GT(not_weightable, 500);
}

TEST(Properties, BasepointIndependence) {
    qmtest::Rng rng(9);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = qmtest::pick(rng, 2, 12);
        const Matrix rho = qmtest::random_metric(rng, n);
        const Matrix d = qmtest::weighted_from(rho, qmtest::random_lipschitz_weight(rng, rho));
        const auto a = recover_weight(d, 0).values;
        for (std::size_t b = 1; b < n; ++b)
            EXPECT_LE(qmtest::constant_offset_deviation(a, recover_weight(d, b).values), 1e-9);
    }
}

TEST(Properties, RoundTripsAndBounds) {
    qmtest::Rng rng(13);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = qmtest::pick(rng, 2, 12);
        const auto rho = FiniteMetric::create(default_labels(n), qmtest::random_metric(rng, n));
        const auto w = qmtest::random_lipschitz_weight(rng, rho.matrix());

        const auto qw = compose(rho, w);
        EXPECT_LE(qmtest::max_abs_diff(qw.matrix(), qmtest::weighted_from(rho.matrix(), w)), 0.0);
        const auto [rho2, w2] = decompose(qw);
        EXPECT_LE(qmtest::max_abs_diff(rho2.matrix(), rho.matrix()), 1e-12);
        EXPECT_EQ(w2, w);
        EXPECT_LE(qmtest::max_abs_diff(compose(rho2, w2).matrix(), qw.matrix()), 1e-12);
        EXPECT_TRUE(check_perimeter_identity(qw.matrix()).holds);
        const auto rec = normalize_weight(recover_weight(qw.matrix(), 0));
        EXPECT_LE(qmtest::constant_offset_deviation(rec, w), 1e-9);
        EXPECT_TRUE(check_embedding(qw).passed);

        std::vector<double> f(w.begin(), w.end());
        for (auto& x : f) x *= 0.5;
        const auto g = graph_space(rho, f);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                EXPECT_LE(0.5 * std::abs(g.weight()[i] - g.weight()[j]), rho(i, j) + 1e-12);
        EXPECT_TRUE(check_embedding(g).passed);
    }
}
