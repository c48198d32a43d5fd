#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "quasimetric/core.hpp"
#include "support.hpp"

using namespace quasimetric;
using qmtest::w3;

TEST(Validate, W3Passes) {
    const auto r = validate_quasi_metric(w3());
    EXPECT_TRUE(r.passed);
    EXPECT_TRUE(r.violations.empty());
    EXPECT_TRUE(qmtest::brute_quasi_metric(w3(), 0.0));
}

TEST(Validate, TwoPointMetricPasses) {
    EXPECT_TRUE(validate_quasi_metric(Matrix::from_rows({{0, 1}, {1, 0}})).passed);
    EXPECT_TRUE(validate_metric(Matrix::from_rows({{0, 1}, {1, 0}})).passed);
}

TEST(Validate, TriangleWitness) {
    const auto d = Matrix::from_rows({{0, 1, 10}, {5, 0, 1}, {1, 1, 0}});
    const auto r = validate_quasi_metric(d);
    ASSERT_FALSE(r.passed);
    const Violation* v = r.find("triangle");
    ASSERT_NE(v, nullptr);
    EXPECT_EQ(v->witness, (std::vector<std::size_t>{0, 1, 2}));
    EXPECT_DOUBLE_EQ(v->residual, 8.0);
    EXPECT_EQ(v->count, 2u);  // d(y,x) = 5 > d(y,z) + d(z,x) as well
}

TEST(Validate, IdentityAndNegativity) {
    const auto r = validate_quasi_metric(Matrix::from_rows({{0.5, 1}, {-1, 0}}));
    ASSERT_FALSE(r.passed);
    ASSERT_NE(r.find("identity"), nullptr);
    EXPECT_EQ(r.find("identity")->witness, (std::vector<std::size_t>{0, 0}));
    ASSERT_NE(r.find("nonnegativity"), nullptr);
    EXPECT_EQ(r.find("nonnegativity")->witness, (std::vector<std::size_t>{1, 0}));
}

TEST(Validate, StrictVersusWeakSeparation) {
    const auto one_zero = Matrix::from_rows({{0, 0}, {1, 0}});
    EXPECT_FALSE(validate_quasi_metric(one_zero).passed);
    EXPECT_NE(validate_quasi_metric(one_zero).find("positiveness"), nullptr);
    EXPECT_TRUE(validate_quasi_metric(one_zero, {1e-9, true, 1}).passed);

    const auto both_zero = Matrix::from_rows({{0, 0}, {0, 0}});
    const auto weak = validate_quasi_metric(both_zero, {1e-9, true, 1});
    EXPECT_FALSE(weak.passed);
    EXPECT_NE(weak.find("separation"), nullptr);
}

TEST(Validate, ToleranceScalesWithEntries) {
    EXPECT_DOUBLE_EQ(effective_tolerance(Matrix::from_rows({{0, 0.5}, {0.5, 0}}), 1e-9), 1e-9);
    EXPECT_DOUBLE_EQ(effective_tolerance(Matrix::from_rows({{0, 1000}, {1000, 0}}), 1e-9), 1e-6);
    // Triangle excess of 1e-7 is noise at scale 1e3.
    auto d = Matrix::from_rows({{0, 1000, 2000 + 1e-7}, {1000, 0, 1000}, {2000, 1000, 0}});
    EXPECT_TRUE(validate_quasi_metric(d).passed);
    d(0, 2) = 2000.01;
    EXPECT_FALSE(validate_quasi_metric(d).passed);
}

TEST(Validate, StructuralErrors) {
    EXPECT_THROW(Matrix::from_rows({{0, 1}, {1}}), StructuralError);
    auto d = Matrix::from_rows({{0, 1}, {1, 0}});
    d(0, 1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(validate_quasi_metric(d), StructuralError);
    d(0, 1) = INFINITY;
    EXPECT_THROW(validate_quasi_metric(d), StructuralError);
}

TEST(Validate, ThreadCountDoesNotChangeReport) {
    qmtest::Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix d = qmtest::random_quasi_metric(rng, 30);
        for (int k = 0; k < 10; ++k) d(qmtest::pick(rng, 0, 29), qmtest::pick(rng, 0, 29)) += 50.0;
        for (std::size_t i = 0; i < 30; ++i) d(i, i) = 0.0;
        const auto one = validate_quasi_metric(d, {1e-9, false, 1});
        for (unsigned t : {2u, 3u, 8u}) {
            const auto many = validate_quasi_metric(d, {1e-9, false, t});
            ASSERT_EQ(one.passed, many.passed);
            ASSERT_EQ(one.max_residual, many.max_residual);
            ASSERT_EQ(one.violations.size(), many.violations.size());
            for (std::size_t k = 0; k < one.violations.size(); ++k) {
                EXPECT_EQ(one.violations[k].axiom, many.violations[k].axiom);
                EXPECT_EQ(one.violations[k].witness, many.violations[k].witness);
                EXPECT_EQ(one.violations[k].count, many.violations[k].count);
            }
        }
    }
}

TEST(Validate, AgreesWithBruteForceOnRandomMatrices) {
    qmtest::Rng rng(11);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = qmtest::pick(rng, 2, 6);
        Matrix d(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                d(i, j) = i == j ? 0.0 : static_cast<double>(qmtest::pick(rng, 1, 6));
        EXPECT_EQ(validate_quasi_metric(d, {0.0, false, 1}).passed, qmtest::brute_quasi_metric(d, 0.0));
    }
}

TEST(Create, RejectsInvalidAndKeepsLabels) {
    EXPECT_THROW(FiniteQuasiMetric::create({"a", "b"}, Matrix::from_rows({{0, -1}, {1, 0}})), AxiomError);
    EXPECT_THROW(FiniteMetric::create({"a", "b"}, Matrix::from_rows({{0, 2}, {1, 0}})), AxiomError);
    EXPECT_THROW(FiniteQuasiMetric::create({"a"}, Matrix::from_rows({{0, 1}, {1, 0}})), StructuralError);
    const auto q = FiniteQuasiMetric::create({"x", "y", "z"}, w3());
    EXPECT_EQ(q.index_of("z"), 2u);
    EXPECT_EQ(q.index_of("1"), 1u);
    EXPECT_THROW(q.index_of("w"), StructuralError);
}

TEST(Derived, W3Examples) {
    const auto q = FiniteQuasiMetric::create({"x", "y", "z"}, w3());
    EXPECT_EQ(reverse(q).matrix(), w3().transposed());
    EXPECT_EQ(symmetrize(q).matrix(), qmtest::w3_rho());
    const auto star = max_metric(q);
    EXPECT_EQ(star(0, 1), 3.0);
    EXPECT_EQ(star(1, 2), 3.5);
    EXPECT_EQ(star(0, 2), 4.5);
}

TEST(Derived, SymmetricInputIsFixed) {
    const auto rho = FiniteMetric::create({"x", "y", "z"}, qmtest::w3_rho());
    EXPECT_EQ(reverse(rho).matrix(), rho.matrix());
    EXPECT_EQ(symmetrize(rho).matrix(), rho.matrix());
    EXPECT_EQ(max_metric(rho).matrix(), rho.matrix());
}

TEST(Derived, PropertiesOnRandomSpaces) {
    qmtest::Rng rng(3);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = qmtest::pick(rng, 2, 12);
        const Matrix d = trial % 2 ? qmtest::random_quasi_metric(rng, n)
                                   : [&] {
                                         const Matrix rho = qmtest::random_metric(rng, n);
                                         return qmtest::weighted_from(rho, qmtest::random_lipschitz_weight(rng, rho));
                                     }();
        const auto q = FiniteQuasiMetric::create(default_labels(n), d);
        EXPECT_TRUE(validate_quasi_metric(reverse(q).matrix()).passed);
        EXPECT_EQ(reverse(reverse(q)).matrix(), d);
        const Matrix rho = symmetrize(d);
        const Matrix star = max_metric(d);
        EXPECT_TRUE(validate_metric(rho).passed);
        EXPECT_TRUE(validate_metric(star).passed);
        EXPECT_EQ(symmetrize(reverse(q)).matrix(), rho);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                EXPECT_LE(rho(i, j), star(i, j));
                EXPECT_LE(star(i, j), 2.0 * rho(i, j));
            }
    }
}
