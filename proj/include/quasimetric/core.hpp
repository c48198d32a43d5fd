#pragma once

// Finite quasi-metric spaces: dense distance matrices, axiom validation and
// the symmetric metrics derived from an asymmetric distance.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace quasimetric {

/// Dense square matrix of doubles, row-major.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

    /// Throws StructuralError when the rows are ragged or not square.
    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t size() const noexcept { return n_; }

    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * n_ + j]; }

    const std::vector<double>& data() const noexcept { return data_; }

    Matrix transposed() const;
    double max_abs() const noexcept;
    std::vector<std::vector<double>> rows() const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// Malformed input: ragged or non-square matrix, non-finite entries,
/// mismatched labels, bad indices. Distinct from an axiom failure.
class StructuralError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Violation {
    std::string axiom;
    std::vector<std::size_t> witness;  // worst offending pair or triple
    double residual = 0.0;             // residual at the witness
    std::size_t count = 0;             // number of offending tuples
};

struct ValidationReport {
    bool passed = true;
    std::vector<Violation> violations;
    double max_residual = 0.0;

    /// Records a residual; a value above tol becomes (or updates) a violation.
    void record(const std::string& axiom, std::vector<std::size_t> witness, double residual,
                double tol);
    /// Records a violation unconditionally (axioms without a numeric margin).
    void flag(const std::string& axiom, std::vector<std::size_t> witness, double residual);
    void merge(const ValidationReport& other);
    const Violation* find(const std::string& axiom) const;
};

struct ValidationOptions {
    double tol = 1e-9;             // relative to max(1, largest |entry|)
    bool weak_separation = false;  // only require d(x,y)=d(y,x)=0 => x=y
    unsigned threads = 1;          // triple scans are split by row
};

/// Absolute tolerance used for checks on m: tol * max(1, max |m(i,j)|).
double effective_tolerance(const Matrix& m, double tol);

/// Throws StructuralError if m has a non-finite entry.
void require_finite(const Matrix& m);

/// Checks identity, non-negativity, positiveness (or separation in weak mode)
/// and the triangle inequality. Every violated axiom is reported once with
/// its worst witness and the number of offending tuples.
ValidationReport validate_quasi_metric(const Matrix& d, const ValidationOptions& opts = {});

/// validate_quasi_metric plus exact symmetry.
ValidationReport validate_metric(const Matrix& d, const ValidationOptions& opts = {});

class AxiomError : public std::runtime_error {
public:
    AxiomError(const std::string& what, ValidationReport report)
        : std::runtime_error(what), report_(std::move(report)) {}
    const ValidationReport& report() const noexcept { return report_; }

private:
    ValidationReport report_;
};

/// Default labels x0, x1, ...
std::vector<std::string> default_labels(std::size_t n);

class FiniteQuasiMetric {
public:
    /// Validates and throws AxiomError when an axiom fails.
    static FiniteQuasiMetric create(std::vector<std::string> labels, Matrix d,
                                    const ValidationOptions& opts = {});
    /// Wraps a matrix already known to be valid (results of exact constructions).
    static FiniteQuasiMetric unchecked(std::vector<std::string> labels, Matrix d);

    std::size_t size() const noexcept { return d_.size(); }
    const Matrix& matrix() const noexcept { return d_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return d_(i, j); }

    /// Index of a label, or of a decimal index string. Throws StructuralError.
    std::size_t index_of(const std::string& label) const;

protected:
    FiniteQuasiMetric(std::vector<std::string> labels, Matrix d);

    std::vector<std::string> labels_;
    Matrix d_;
};

class FiniteMetric : public FiniteQuasiMetric {
public:
    static FiniteMetric create(std::vector<std::string> labels, Matrix d,
                               const ValidationOptions& opts = {});
    static FiniteMetric unchecked(std::vector<std::string> labels, Matrix d);

private:
    using FiniteQuasiMetric::FiniteQuasiMetric;
};

/// d'(x,y) = d(y,x).
FiniteQuasiMetric reverse(const FiniteQuasiMetric& q);

/// rho(x,y) = (d(x,y) + d(y,x)) / 2.
FiniteMetric symmetrize(const FiniteQuasiMetric& q);
Matrix symmetrize(const Matrix& d);

/// d*(x,y) = max(d(x,y), d(y,x)).
FiniteMetric max_metric(const FiniteQuasiMetric& q);
Matrix max_metric(const Matrix& d);

}  // namespace quasimetric
