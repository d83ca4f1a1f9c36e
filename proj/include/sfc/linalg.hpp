#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sfc::linalg {

using Vector = std::vector<double>;

/// Dense row-major matrix. Sized for feature counts in the tens.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    /// Throws DimensionMismatch unless values.size() == rows * cols.
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    static Matrix identity(std::size_t n);
    static Matrix diagonal(std::span<const double> diag);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    const std::vector<double>& values() const { return data_; }

    double trace() const;
    Matrix scaled(double c) const;
    Vector multiply(std::span<const double> v) const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// A + ridge * I = L * L^T with L lower triangular.
class SpdFactorization {
public:
    std::size_t dim() const { return lower_.rows(); }
    const Matrix& lower() const { return lower_; }
    double ridge() const { return ridge_; }

private:
    friend SpdFactorization spd_factor(const Matrix& a, double ridge);
    Matrix lower_;
    double ridge_ = 0.0;
};

/// Cholesky factorization of a + ridge * I. Throws NotPositiveDefinite when a
/// pivot is not strictly positive, DimensionMismatch if a is not square.
SpdFactorization spd_factor(const Matrix& a, double ridge = 0.0);

/// Tries ridge 0, then 1e-8 * trace/n, then 1e-4 * trace/n.
SpdFactorization spd_factor_with_fallback(const Matrix& a);

/// x with (A + ridge I) x = b.
Vector solve(const SpdFactorization& f, std::span<const double> b);

Matrix inverse(const SpdFactorization& f);

/// 2 * sum(log L_ii).
double log_det(const SpdFactorization& f);

/// (X' W X)^-1 X' W z with W = diag(weights). No ridge: collinear columns
/// raise NotPositiveDefinite.
Vector weighted_normal_solve(const Matrix& x, std::span<const double> weights, std::span<const double> z);

double dot(std::span<const double> a, std::span<const double> b);

/// a * M * b' for row vectors a, b.
double quadratic_form(std::span<const double> a, const Matrix& m, std::span<const double> b);

}  // namespace sfc::linalg
