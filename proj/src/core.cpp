#include "quasimetric/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <thread>

namespace quasimetric {

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.size()) {
            throw StructuralError("matrix row " + std::to_string(i) + " has " +
                                  std::to_string(rows[i].size()) + " entries, expected " +
                                  std::to_string(rows.size()));
        }
        std::copy(rows[i].begin(), rows[i].end(), m.data_.begin() + i * m.n_);
    }
    return m;
}

Matrix Matrix::transposed() const {
    Matrix t(n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double Matrix::max_abs() const noexcept {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

std::vector<std::vector<double>> Matrix::rows() const {
    std::vector<std::vector<double>> out(n_);
    for (std::size_t i = 0; i < n_; ++i)
        out[i].assign(data_.begin() + i * n_, data_.begin() + (i + 1) * n_);
    return out;
}

void ValidationReport::record(const std::string& axiom, std::vector<std::size_t> witness,
                              double residual, double tol) {
    max_residual = std::max(max_residual, residual);
    if (residual > tol) flag(axiom, std::move(witness), residual);
}

void ValidationReport::flag(const std::string& axiom, std::vector<std::size_t> witness,
                            double residual) {
    for (auto& v : violations) {
        if (v.axiom == axiom) {
            ++v.count;
            if (residual > v.residual) {
                v.residual = residual;
                v.witness = std::move(witness);
            }
            return;
        }
    }
    violations.push_back({axiom, std::move(witness), residual, 1});
    passed = false;
}

void ValidationReport::merge(const ValidationReport& other) {
    max_residual = std::max(max_residual, other.max_residual);
    for (const auto& o : other.violations) {
        auto it = std::find_if(violations.begin(), violations.end(),
                               [&](const Violation& v) { return v.axiom == o.axiom; });
        if (it == violations.end()) {
            violations.push_back(o);
        } else {
            it->count += o.count;
            if (o.residual > it->residual) {
                it->residual = o.residual;
                it->witness = o.witness;
            }
        }
    }
    passed = violations.empty();
}

const Violation* ValidationReport::find(const std::string& axiom) const {
    for (const auto& v : violations)
        if (v.axiom == axiom) return &v;
    return nullptr;
}

double effective_tolerance(const Matrix& m, double tol) {
    return tol * std::max(1.0, m.max_abs());
}

void require_finite(const Matrix& m) {
    const std::size_t n = m.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (!std::isfinite(m(i, j)))
                throw StructuralError("non-finite entry at (" + std::to_string(i) + "," +
                                      std::to_string(j) + ")");
}

namespace {

// Rows [begin, end) of the triangle scan.
ValidationReport scan_triangles(const Matrix& d, std::size_t begin, std::size_t end, double tol) {
    ValidationReport r;
    const std::size_t n = d.size();
    for (std::size_t i = begin; i < end; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            if (k == i) continue;
            const double dik = d(i, k);
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i || j == k) continue;
                const double excess = d(i, j) - dik - d(k, j);
                if (excess > 0.0) r.record("triangle", {i, k, j}, excess, tol);
            }
        }
    return r;
}

ValidationReport scan_triangles(const Matrix& d, double tol, unsigned threads) {
    const std::size_t n = d.size();
    const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
    if (workers == 1) return scan_triangles(d, 0, n, tol);

    // Fixed row blocks, merged in block order so the result does not depend
    // on scheduling.
    std::vector<ValidationReport> parts(workers);
    std::vector<std::thread> pool;
    const std::size_t block = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t b = std::min(n, w * block), e = std::min(n, b + block);
        pool.emplace_back([&, w, b, e] { parts[w] = scan_triangles(d, b, e, tol); });
    }
    for (auto& t : pool) t.join();
    ValidationReport r;
    for (const auto& p : parts) r.merge(p);
    return r;
}

}  // namespace

ValidationReport validate_quasi_metric(const Matrix& d, const ValidationOptions& opts) {
    require_finite(d);
    const std::size_t n = d.size();
    const double tol = effective_tolerance(d, opts.tol);
    ValidationReport r;

    for (std::size_t i = 0; i < n; ++i) r.record("identity", {i, i}, std::abs(d(i, i)), tol);

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (d(i, j) < 0.0) r.record("nonnegativity", {i, j}, -d(i, j), tol);
            if (opts.weak_separation) {
                if (i < j && d(i, j) <= tol && d(j, i) <= tol)
                    r.flag("separation", {i, j}, tol - std::max(d(i, j), d(j, i)));
            } else if (d(i, j) <= tol && d(i, j) >= -tol) {
                // Residual is the shortfall below the zero threshold.
                r.flag("positiveness", {i, j}, tol - d(i, j));
            }
        }

    r.merge(scan_triangles(d, tol, opts.threads));
    r.passed = r.violations.empty();
    return r;
}

ValidationReport validate_metric(const Matrix& d, const ValidationOptions& opts) {
    ValidationReport r = validate_quasi_metric(d, opts);
    const std::size_t n = d.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double diff = std::abs(d(i, j) - d(j, i));
            // Symmetry is exact: any nonzero difference is a violation.
            if (diff > 0.0) r.record("symmetry", {i, j}, diff, 0.0);
        }
    r.passed = r.violations.empty();
    return r;
}

std::vector<std::string> default_labels(std::size_t n) {
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back("x" + std::to_string(i));
    return out;
}

FiniteQuasiMetric::FiniteQuasiMetric(std::vector<std::string> labels, Matrix d)
    : labels_(std::move(labels)), d_(std::move(d)) {
    if (labels_.empty()) labels_ = default_labels(d_.size());
    if (labels_.size() != d_.size())
        throw StructuralError(std::to_string(labels_.size()) + " labels for a " +
                              std::to_string(d_.size()) + "-point matrix");
}

FiniteQuasiMetric FiniteQuasiMetric::create(std::vector<std::string> labels, Matrix d,
                                            const ValidationOptions& opts) {
    ValidationReport r = validate_quasi_metric(d, opts);
    if (!r.passed) throw AxiomError("not a quasi-metric: " + r.violations.front().axiom, r);
    return FiniteQuasiMetric(std::move(labels), std::move(d));
}

FiniteQuasiMetric FiniteQuasiMetric::unchecked(std::vector<std::string> labels, Matrix d) {
    return FiniteQuasiMetric(std::move(labels), std::move(d));
}

std::size_t FiniteQuasiMetric::index_of(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it != labels_.end()) return static_cast<std::size_t>(it - labels_.begin());
    std::size_t idx = 0;
    auto [ptr, ec] = std::from_chars(label.data(), label.data() + label.size(), idx);
    if (ec == std::errc() && ptr == label.data() + label.size() && idx < size()) return idx;
    throw StructuralError("unknown point '" + label + "'");
}

FiniteMetric FiniteMetric::create(std::vector<std::string> labels, Matrix d,
                                  const ValidationOptions& opts) {
    ValidationReport r = validate_metric(d, opts);
    if (!r.passed) throw AxiomError("not a metric: " + r.violations.front().axiom, r);
    return FiniteMetric(std::move(labels), std::move(d));
}

FiniteMetric FiniteMetric::unchecked(std::vector<std::string> labels, Matrix d) {
    return FiniteMetric(std::move(labels), std::move(d));
}

FiniteQuasiMetric reverse(const FiniteQuasiMetric& q) {
    return FiniteQuasiMetric::unchecked(q.labels(), q.matrix().transposed());
}

Matrix symmetrize(const Matrix& d) {
    const std::size_t n = d.size();
    Matrix rho(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            rho(i, j) = i == j ? 0.0 : (d(i, j) + d(j, i)) / 2.0;
    return rho;
}

FiniteMetric symmetrize(const FiniteQuasiMetric& q) {
    return FiniteMetric::unchecked(q.labels(), symmetrize(q.matrix()));
}

Matrix max_metric(const Matrix& d) {
    const std::size_t n = d.size();
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = std::max(d(i, j), d(j, i));
    return m;
}

FiniteMetric max_metric(const FiniteQuasiMetric& q) {
    return FiniteMetric::unchecked(q.labels(), max_metric(q.matrix()));
}

}  // namespace quasimetric
