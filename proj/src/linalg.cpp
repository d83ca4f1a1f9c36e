#include "sfc/linalg.hpp"

#include <cmath>
#include <string>

#include "sfc/errors.hpp"

namespace sfc::linalg {

namespace {
constexpr double kRelativePivotFloor = 1e-12;
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
    if (data_.size() != rows_ * cols_) {
        throw DimensionMismatch("matrix " + std::to_string(rows_) + "x" + std::to_string(cols_) + " given " +
                                std::to_string(data_.size()) + " values");
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
    Matrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
}

double Matrix::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
}

Matrix Matrix::scaled(double c) const {
    Matrix m = *this;
    for (double& v : m.data_) v *= c;
    return m;
}

Vector Matrix::multiply(std::span<const double> v) const {
    if (v.size() != cols_) throw DimensionMismatch("matrix-vector product");
    Vector out(rows_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = dot(row(r), v);
    return out;
}

SpdFactorization spd_factor(const Matrix& a, double ridge) {
    if (!a.is_square()) throw DimensionMismatch("spd_factor needs a square matrix");
    const std::size_t n = a.rows();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const double diag = a(j, j) + ridge;
        double pivot = diag;
        for (std::size_t k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
        // a pivot lost to cancellation means the column is (numerically) dependent
        if (!(pivot > kRelativePivotFloor * diag) || !std::isfinite(pivot)) {
            throw NotPositiveDefinite("non-positive pivot at column " + std::to_string(j) +
                                      " (ridge " + std::to_string(ridge) + ")");
        }
        const double d = std::sqrt(pivot);
        l(j, j) = d;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / d;
        }
    }
    SpdFactorization f;
    f.lower_ = std::move(l);
    f.ridge_ = ridge;
    return f;
}

SpdFactorization spd_factor_with_fallback(const Matrix& a) {
    try {
        return spd_factor(a, 0.0);
    } catch (const NotPositiveDefinite&) {
    }
    const double scale = a.rows() > 0 ? std::abs(a.trace()) / static_cast<double>(a.rows()) : 0.0;
    try {
        return spd_factor(a, 1e-8 * scale);
    } catch (const NotPositiveDefinite&) {
    }
    try {
        return spd_factor(a, 1e-4 * scale);
    } catch (const NotPositiveDefinite& e) {
        throw NotPositiveDefinite(std::string(e.what()) + "; ridge fallback exhausted, features degenerate");
    }
}

Vector solve(const SpdFactorization& f, std::span<const double> b) {
    const std::size_t n = f.dim();
    if (b.size() != n) throw DimensionMismatch("solve: rhs has " + std::to_string(b.size()) + " entries, need " +
                                               std::to_string(n));
    const Matrix& l = f.lower();
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
        y[i] = s / l(i, i);
    }
    Vector x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = y[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
        x[i] = s / l(i, i);
    }
    return x;
}

Matrix inverse(const SpdFactorization& f) {
    const std::size_t n = f.dim();
    Matrix inv(n, n);
    Vector e(n, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
        e[c] = 1.0;
        const Vector col = solve(f, e);
        for (std::size_t r = 0; r < n; ++r) inv(r, c) = col[r];
        e[c] = 0.0;
    }
    // symmetrize away rounding noise
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = r + 1; c < n; ++c) {
            const double avg = 0.5 * (inv(r, c) + inv(c, r));
            inv(r, c) = avg;
            inv(c, r) = avg;
        }
    }
    return inv;
}

double log_det(const SpdFactorization& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.dim(); ++i) s += std::log(f.lower()(i, i));
    return 2.0 * s;
}

Vector weighted_normal_solve(const Matrix& x, std::span<const double> weights, std::span<const double> z) {
    const std::size_t rows = x.rows();
    const std::size_t cols = x.cols();
    if (weights.size() != rows || z.size() != rows) {
        throw DimensionMismatch("weighted_normal_solve: " + std::to_string(rows) + " rows, " +
                                std::to_string(weights.size()) + " weights, " + std::to_string(z.size()) +
                                " responses");
    }
    Matrix normal(cols, cols);
    Vector rhs(cols, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
        const double w = weights[i];
        if (w < 0.0) throw DomainError("negative weight in weighted_normal_solve");
        if (w == 0.0) continue;
        const auto xi = x.row(i);
        for (std::size_t a = 0; a < cols; ++a) {
            const double wa = w * xi[a];
            rhs[a] += wa * z[i];
            for (std::size_t b = 0; b <= a; ++b) normal(a, b) += wa * xi[b];
        }
    }
    for (std::size_t a = 0; a < cols; ++a) {
        for (std::size_t b = 0; b < a; ++b) normal(b, a) = normal(a, b);
    }
    return solve(spd_factor(normal, 0.0), rhs);
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DimensionMismatch("dot product of unequal lengths");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double quadratic_form(std::span<const double> a, const Matrix& m, std::span<const double> b) {
    if (a.size() != m.rows() || b.size() != m.cols()) throw DimensionMismatch("quadratic form");
    double s = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        if (a[r] == 0.0) continue;
        s += a[r] * dot(m.row(r), b);
    }
    return s;
}

}  // namespace sfc::linalg
