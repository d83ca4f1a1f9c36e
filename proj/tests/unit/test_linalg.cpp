#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sfc/errors.hpp"
#include "sfc/linalg.hpp"

using namespace sfc;
using namespace sfc::linalg;

namespace {

Matrix random_spd(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix b(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) b(i, j) = g(rng);
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = i == j ? static_cast<double>(n) : 0.0;
            for (std::size_t k = 0; k < n; ++k) s += b(i, k) * b(j, k);
            a(i, j) = s;
        }
    return a;
}

std::vector<std::vector<double>> to_rows(const Matrix& a) {
    std::vector<std::vector<double>> rows(a.rows(), std::vector<double>(a.cols()));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) rows[i][j] = a(i, j);
    return rows;
}


double weighted_sse(const Matrix& x, const Vector& w, const Vector& z, const Vector& beta) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const double r = z[i] - dot(x.row(i), beta);
        s += w[i] * r * r;
    }
    return s;
}

}  // namespace

TEST_CASE("cholesky of simple matrices") {
    CHECK(spd_factor(Matrix::identity(2)).lower() == Matrix::identity(2));
    const double d49[] = {4.0, 9.0};
    const Matrix l = spd_factor(Matrix::diagonal(d49)).lower();
    CHECK(l(0, 0) == 2.0);
    CHECK(l(1, 1) == 3.0);
    CHECK(l(1, 0) == 0.0);
    const double d10[] = {1.0, 0.0};
    CHECK_THROWS_AS(spd_factor(Matrix::diagonal(d10)), NotPositiveDefinite);
    CHECK_NOTHROW(spd_factor(Matrix::diagonal(d10), 1e-6));
    CHECK_THROWS_AS(spd_factor(Matrix(2, 3)), DimensionMismatch);
}

TEST_CASE("ridge fallback") {
    const double d10[] = {1.0, 0.0};
    const auto f = spd_factor_with_fallback(Matrix::diagonal(d10));
    CHECK(f.ridge() == doctest::Approx(1e-8 * 0.5).epsilon(1e-12));
    CHECK(spd_factor_with_fallback(Matrix::identity(3)).ridge() == 0.0);
}

TEST_CASE("solve") {
    const double d24[] = {2.0, 4.0};
    const Vector b{2.0, 4.0};
    const Vector x = solve(spd_factor(Matrix::diagonal(d24)), b);
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(1.0));
    const Vector c{3.0, -1.0, 0.5};
    CHECK(solve(spd_factor(Matrix::identity(3)), c) == c);

    std::mt19937_64 rng(1);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + trial % 8;
        const Matrix a = random_spd(rng, n);
        Vector rhs(n);
        for (auto& v : rhs) v = g(rng);
        const Vector sol = solve(spd_factor(a), rhs);
        const Vector back = a.multiply(sol);
        double bmax = 0.0, rmax = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            bmax = std::max(bmax, std::abs(rhs[i]));
            rmax = std::max(rmax, std::abs(back[i] - rhs[i]));
        }
        CHECK(rmax < 1e-10 * bmax);
    }
}

TEST_CASE("log determinant") {
    CHECK(log_det(spd_factor(Matrix::identity(3))) == 0.0);
    const double d22[] = {2.0, 2.0};
    CHECK(log_det(spd_factor(Matrix::diagonal(d22))) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-15));

    std::mt19937_64 rng(2);
    for (std::size_t n = 1; n <= 5; ++n) {
        for (int trial = 0; trial < 20; ++trial) {
            const Matrix a = random_spd(rng, n);
            const double oracle = oracle::cofactor_det(to_rows(a));
            const double det = std::exp(log_det(spd_factor(a)));
            CHECK(std::abs(det - oracle) <= 1e-9 * std::abs(oracle));
            const double c = 3.7;
            CHECK(log_det(spd_factor(a.scaled(c))) ==
                  doctest::Approx(log_det(spd_factor(a)) + static_cast<double>(n) * std::log(c)).epsilon(1e-12));
        }
    }
}

TEST_CASE("inverse matches the Gauss-Jordan oracle") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + trial % 6;
        const Matrix a = random_spd(rng, n);
        const Matrix inv = inverse(spd_factor(a));
        const auto oracle = oracle::gauss_jordan_inverse(to_rows(a));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(inv(i, j) - oracle[i][j]) < 1e-9);
    }
}

TEST_CASE("weighted normal equations") {
    // column of ones with unit weights gives the mean
    Matrix ones(4, 1, 1.0);
    const Vector w1(4, 1.0);
    const Vector z{1.0, 2.0, 3.0, 10.0};
    CHECK(weighted_normal_solve(ones, w1, z)[0] == doctest::Approx(4.0));

    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    const std::size_t rows = 40, cols = 5;
    Matrix x(rows, cols);
    Vector w(rows), zz(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) x(i, j) = g(rng);
        w[i] = u(rng);
        zz[i] = g(rng);
    }
    const Vector beta = weighted_normal_solve(x, w, zz);

    // equal weights c cancel
    const Vector c1(rows, 1.0), c7(rows, 7.0);
    const Vector b1 = weighted_normal_solve(x, c1, zz), b7 = weighted_normal_solve(x, c7, zz);
    for (std::size_t j = 0; j < cols; ++j) CHECK(b1[j] == doctest::Approx(b7[j]).epsilon(1e-12));

    // explicit (X'WX)^-1 X'Wz with the Gauss-Jordan oracle
    std::vector<std::vector<double>> xtwx(cols, std::vector<double>(cols, 0.0));
    std::vector<double> xtwz(cols, 0.0);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t a = 0; a < cols; ++a) {
            xtwz[a] += x(i, a) * w[i] * zz[i];
            for (std::size_t b = 0; b < cols; ++b) xtwx[a][b] += x(i, a) * w[i] * x(i, b);
        }
    const auto inv = oracle::gauss_jordan_inverse(xtwx);
    for (std::size_t a = 0; a < cols; ++a) {
        double expected = 0.0;
        for (std::size_t b = 0; b < cols; ++b) expected += inv[a][b] * xtwz[b];
        CHECK(std::abs(beta[a] - expected) < 1e-9);
    }

    // perturbing the solution never lowers the weighted residual
    const double best = weighted_sse(x, w, zz, beta);
    for (int trial = 0; trial < 200; ++trial) {
        Vector candidate = beta;
        for (auto& v : candidate) v += 1e-3 * g(rng);
        CHECK(weighted_sse(x, w, zz, candidate) >= best);
    }

    const Vector negative(rows, -1.0);
    CHECK_THROWS_AS(weighted_normal_solve(x, negative, zz), DomainError);

    Matrix collinear(3, 2);
    for (std::size_t i = 0; i < 3; ++i) {
        collinear(i, 0) = static_cast<double>(i);
        collinear(i, 1) = 2.0 * static_cast<double>(i);
    }
    const Vector w3(3, 1.0), z3{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(weighted_normal_solve(collinear, w3, z3), NotPositiveDefinite);
}
