#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "symred/geomcore.hpp"

using namespace symred;

namespace {

ChartMap affine(const Matrix& a, const Vector& b) {
    return [a, b](const Vector& x) { return Vector(a * x + b); };
}

TEST_CASE("chart points and tangent vectors reject non-finite data") {
    CHECK_THROWS_AS(ChartPoint({1.0, std::numeric_limits<double>::quiet_NaN()}), GeometryError);
    CHECK_THROWS_AS(TangentVector(ChartPoint{0.0, 0.0}, Vector::Zero(3)), GeometryError);
    const ChartPoint p{1.0, 2.0};
    CHECK(p.dim() == 2);
    CHECK(p[1] == 2.0);
}

TEST_CASE("eval_field examples") {
    const auto id = TensorField::constant(Matrix::Identity(3, 3));
    CHECK(max_abs(eval_field(id, ChartPoint{0.3, -1.0, 2.0}) - Matrix::Identity(3, 3)) == 0.0);

    const auto diag = TensorField::matrix(2, 2, [](const Vector& p) {
        Matrix m = Matrix::Identity(2, 2);
        m(0, 0) = p(0) * p(0);
        return m;
    });
    const Matrix expected = (Matrix(2, 2) << 4, 0, 0, 1).finished();
    CHECK(max_abs(eval_field(diag, ChartPoint{2.0, 0.0}) - expected) == 0.0);

    const Matrix w = eval_field(TensorField::constant(standard_omega(4)), ChartPoint{1, 2, 3, 4});
    CHECK(max_abs(w - oracle::omega_std(4)) == 0.0);
    CHECK(w(0, 1) == 1.0);
    CHECK(w(3, 2) == -1.0);
}

TEST_CASE("eval_field rejects NaN output and wrong shapes") {
    const auto bad = TensorField::scalar([](const Vector&) { return std::numeric_limits<double>::infinity(); });
    try {
        eval_field(bad, ChartPoint{0.0});
        FAIL("expected NonFinite");
    } catch (const GeometryError& e) {
        CHECK(e.kind() == ErrorKind::NonFinite);
    }
    const auto wrong = TensorField::matrix(2, 2, [](const Vector&) { return Matrix::Zero(3, 3); });
    CHECK_THROWS_AS(eval_field(wrong, ChartPoint{0.0}), GeometryError);
}

TEST_CASE("standard acs moves d/dx to d/dy") {
    const Matrix j = standard_acs(4);
    CHECK(max_abs(j - oracle::acs_std(4)) == 0.0);
    Vector ex = Vector::Zero(4);
    ex(2) = 1.0;
    Vector ey = Vector::Zero(4);
    ey(3) = 1.0;
    CHECK((j * ex - ey).norm() == 0.0);
}

TEST_CASE("fd_jacobian examples") {
    const FDConfig cfg;
    const Matrix a = (Matrix(2, 2) << 1, 2, 3, 4).finished();
    CHECK(max_abs(fd_jacobian(affine(Matrix::Identity(3, 3), Vector::Zero(3)), ChartPoint{0.2, 0.4, -1}, cfg) -
                  Matrix::Identity(3, 3)) < 1e-10);
    CHECK(max_abs(fd_jacobian(affine(a, Vector::Zero(2)), ChartPoint{0.0, 0.0}, cfg) - a) < 1e-10);

    const ChartMap square = [](const Vector& p) {
        return Vector((Vector(2) << p(0) * p(0) - p(1) * p(1), 2 * p(0) * p(1)).finished());
    };
    const Matrix expected = (Matrix(2, 2) << 2, -2, 2, 2).finished();
    CHECK(max_abs(fd_jacobian(square, ChartPoint{1.0, 1.0}, cfg) - expected) < 1e-8);
    CHECK(max_abs(fd_jacobian(square, ChartPoint{1.0, 1.0}, {1e-4, 2}) - expected) < 1e-7);
}

TEST_CASE("fd_jacobian rejects bad configs and NaN evaluations") {
    const ChartMap id = [](const Vector& x) { return x; };
    CHECK_THROWS_AS(fd_jacobian(id, ChartPoint{0.0}, {0.0, 4}), GeometryError);
    CHECK_THROWS_AS(fd_jacobian(id, ChartPoint{0.0}, {1e-5, 3}), GeometryError);
    const ChartMap logmap = [](const Vector& x) { return Vector(x.array().log()); };
    CHECK_THROWS_AS(fd_jacobian(logmap, ChartPoint{0.0}, {}), GeometryError);
}

Matrix uniform(std::mt19937_64& rng, Index r, Index c) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix m(r, c);
    for (Index i = 0; i < r; ++i)
        for (Index j = 0; j < c; ++j) m(i, j) = u(rng);
    return m;
}

} // namespace

TEST_CASE("property: fd_jacobian is exact on affine maps for steps in [1e-6, 1e-3]") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 40; ++trial) {
        const Index m = 1 + trial % 4, n = 1 + (trial / 4) % 4;
        const Matrix a = uniform(rng, m, n);
        const Vector b = uniform(rng, m, 1);
        const Vector p = uniform(rng, n, 1);
        for (double step : {1e-6, 1e-5, 1e-4, 1e-3})
            for (int order : {2, 4}) {
                CAPTURE(step);
                CHECK(max_abs(fd_jacobian(affine(a, b), ChartPoint(p), {step, order}) - a) < 1e-10);
            }
    }
}

TEST_CASE("property: affine fd error stays below the evaluation roundoff floor") {
    std::mt19937_64 rng(102);
    const double eps = std::numeric_limits<double>::epsilon();
    for (int trial = 0; trial < 200; ++trial) {
        const Index m = 1 + trial % 4, n = 1 + (trial / 4) % 4;
        const Matrix a = uniform(rng, m, n);
        const Vector b = uniform(rng, m, 1);
        const Vector p = uniform(rng, n, 1);
        const double scale = (a * p + b).cwiseAbs().maxCoeff() + a.cwiseAbs().rowwise().sum().maxCoeff() * (p.cwiseAbs().maxCoeff() + 1.0);
        for (double step : {1e-7, 1e-6, 1e-5, 1e-4, 1e-3})
            for (int order : {2, 4})
                CHECK(max_abs(fd_jacobian(affine(a, b), ChartPoint(p), {step, order}) - a) <= 4.0 * eps * scale / step);
    }
}

TEST_CASE("property: fd_jacobian error falls at the configured order") {
    for (int order : {2, 4}) {
        const double need = std::pow(2.0, order - 1);
        for (const auto& tm : oracle::fd_test_maps()) {
            double h = order == 2 ? 0.05 : 0.2;
            double prev = max_abs(fd_jacobian(tm.map, ChartPoint(tm.point), {h, order}) - tm.jacobian(tm.point));
            int pairs = 0;
            for (int k = 0; k < 6; ++k) {
                h /= 2;
                const double err = max_abs(fd_jacobian(tm.map, ChartPoint(tm.point), {h, order}) - tm.jacobian(tm.point));
                if (err < 1e-10) break;
                CAPTURE(tm.name);
                CAPTURE(h);
                CHECK(prev / err >= need);
                prev = err;
                ++pairs;
            }
            CHECK(pairs >= 2);
        }
    }
}

TEST_CASE("fd_directional examples") {
    const FDConfig cfg;
    const auto c = TensorField::constant((Matrix(2, 2) << 1, 2, 3, 4).finished());
    const ChartPoint p{0.5, -0.5};
    CHECK(max_abs(fd_directional(c, p, TangentVector(p, Vector::Ones(2)), cfg)) == 0.0);

    const auto prod = TensorField::scalar([](const Vector& x) { return x(0) * x(1); });
    const ChartPoint q{1.0, 2.0};
    CHECK(std::abs(fd_directional(prod, q, TangentVector(q, (Vector(2) << 1, 0).finished()), cfg)(0, 0) - 2.0) < 1e-10);

    const auto mu = TensorField::scalar([](const Vector& x) { return 0.5 * x.squaredNorm(); });
    const ChartPoint m{1.0, 0.0, 0.0, 0.0};
    const Vector dir = (Vector(4) << 0, 1, 0, 0).finished();
    CHECK(std::abs(fd_directional(mu, m, TangentVector(m, dir), cfg)(0, 0)) < 1e-10);
    CHECK_THROWS_AS(fd_directional(mu, m, TangentVector(m, Vector::Zero(4)), cfg), GeometryError);

    const Vector grad = fd_gradient(mu, ChartPoint{0.3, -0.2, 0.7, 1.1}, cfg);
    CHECK((grad - (Vector(4) << 0.3, -0.2, 0.7, 1.1).finished()).norm() < 1e-10);
}

TEST_CASE("kernel_basis examples") {
    const Matrix row = (Matrix(1, 4) << 1, 0, 0, 0).finished();
    const auto k = kernel_basis(row);
    REQUIRE(k.size() == 3);
    for (const auto& v : k) CHECK(std::abs(v(0)) < 1e-14);
    Matrix packed(4, 3);
    for (int i = 0; i < 3; ++i) packed.col(i) = k[static_cast<std::size_t>(i)];
    CHECK(max_abs(packed.transpose() * packed - Matrix::Identity(3, 3)) < 1e-12);

    CHECK(kernel_basis(Matrix::Identity(2, 2)).empty());
    CHECK(kernel_basis(Matrix::Zero(2, 2)).size() == 2);
    try {
        kernel_basis(Matrix::Zero(2, 2), 1e-8, true);
        FAIL("expected DegenerateInput");
    } catch (const GeometryError& e) {
        CHECK(e.kind() == ErrorKind::DegenerateInput);
    }
}

TEST_CASE("property: kernel vectors are annihilated and orthonormal") {
    std::mt19937_64 rng(202);
    const double rank_tol = 1e-8;
    for (int trial = 0; trial < 60; ++trial) {
        const Index n = 2 + trial % 6;
        const Index r = 1 + trial % static_cast<int>(n);
        const Matrix m = oracle::gaussian(rng, r, n) * oracle::gaussian(rng, n, n);
        const auto k = kernel_basis(m, rank_tol);
        CHECK(static_cast<Index>(k.size()) == n - r);
        const double norm = m.norm();
        for (std::size_t i = 0; i < k.size(); ++i) {
            CHECK((m * k[i]).norm() < 10 * rank_tol * norm);
            for (std::size_t j = 0; j < k.size(); ++j)
                CHECK(std::abs(k[i].dot(k[j]) - (i == j ? 1.0 : 0.0)) < 1e-12);
        }
    }
}

TEST_CASE("orthonormalize examples") {
    const ChartPoint base{0.0, 0.0};
    std::vector<TangentVector> in = {TangentVector(base, (Vector(2) << 1, 0).finished()),
                                     TangentVector(base, (Vector(2) << 0, 1).finished())};
    auto out = orthonormalize(in, Matrix::Identity(2, 2), 1e-12);
    REQUIRE(out.size() == 2);
    CHECK((out[0].components() - in[0].components()).norm() < 1e-15);
    CHECK((out[1].components() - in[1].components()).norm() < 1e-15);

    in[1] = TangentVector(base, (Vector(2) << 1, 1).finished());
    out = orthonormalize(in, Matrix::Identity(2, 2), 1e-12);
    REQUIRE(out.size() == 2);
    CHECK((out[1].components() - (Vector(2) << 0, 1).finished()).norm() < 1e-15);

    const std::vector<TangentVector> one = {TangentVector(base, (Vector(2) << 1, 0).finished())};
    out = orthonormalize(one, (Matrix(2, 2) << 4, 0, 0, 1).finished(), 1e-12);
    REQUIRE(out.size() == 1);
    CHECK((out[0].components() - (Vector(2) << 0.5, 0).finished()).norm() < 1e-15);
}

TEST_CASE("orthonormalize drops dependent vectors") {
    const ChartPoint base{0.0, 0.0, 0.0};
    const std::vector<TangentVector> in = {TangentVector(base, (Vector(3) << 1, 2, 3).finished()),
                                           TangentVector(base, (Vector(3) << 2, 4, 6).finished()),
                                           TangentVector(base, (Vector(3) << 0, 0, 1).finished())};
    CHECK(orthonormalize(in, Matrix::Identity(3, 3), 1e-10).size() == 2);
}

TEST_CASE("property: orthonormalize is g-orthonormal, span preserving and idempotent") {
    std::mt19937_64 rng(303);
    for (int trial = 0; trial < 50; ++trial) {
        const Index n = 2 + trial % 6;
        const Index k = 1 + trial % static_cast<int>(n);
        const Matrix b = oracle::gaussian(rng, n, n);
        const Matrix g = b * b.transpose() + 0.3 * Matrix::Identity(n, n);
        const Matrix v = oracle::gaussian(rng, n, k);
        const Matrix q = orthonormalize_columns(v, g, 1e-10);
        REQUIRE(q.cols() == k);
        CHECK(max_abs(q.transpose() * g * q - Matrix::Identity(k, k)) < 1e-12);
        // Same span: v is reproduced from its projection onto q.
        CHECK(max_abs(q * (q.transpose() * g * v) - v) < 1e-10 * (1 + max_abs(v)));
        CHECK(max_abs(orthonormalize_columns(q, g, 1e-10) - q) < 1e-12);
    }
}

TEST_CASE("sqrt_inverse_spd examples") {
    CHECK(max_abs(sqrt_inverse_spd(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3)) < 1e-15);
    const Matrix d = (Matrix(2, 2) << 4, 0, 0, 9).finished();
    CHECK(max_abs(sqrt_inverse_spd(d) - (Matrix(2, 2) << 0.5, 0, 0, 1.0 / 3.0).finished()) < 1e-15);
    const Matrix m = (Matrix(2, 2) << 2, 1, 1, 2).finished();
    const Matrix s = sqrt_inverse_spd(m);
    CHECK(max_abs(s * s * m - Matrix::Identity(2, 2)) < 1e-10);
    CHECK(max_abs(s - s.transpose()) < 1e-15);
    try {
        sqrt_inverse_spd((Matrix(2, 2) << 1, 0, 0, -1).finished());
        FAIL("expected NotSPD");
    } catch (const GeometryError& e) {
        CHECK(e.kind() == ErrorKind::NotSPD);
    }
}

TEST_CASE("property: sqrt_inverse_spd commutes with its argument") {
    std::mt19937_64 rng(404);
    for (int trial = 0; trial < 50; ++trial) {
        const Index n = 1 + trial % 8;
        const Matrix b = oracle::gaussian(rng, n, n);
        const Matrix m = b * b.transpose() + 0.5 * Matrix::Identity(n, n);
        const Matrix s = sqrt_inverse_spd(m);
        CHECK(max_abs(s * m - m * s) < 1e-10 * (1 + m.norm()));
        CHECK(max_abs(s * s * m - Matrix::Identity(n, n)) < 1e-10);
        CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(s).eigenvalues().minCoeff() > 0.0);
    }
}

TEST_CASE("min_singular_value and norms") {
    CHECK(min_singular_value(Matrix(0, 0)) == 0.0);
    CHECK(std::abs(min_singular_value((Matrix(2, 2) << 3, 0, 0, 0.5).finished()) - 0.5) < 1e-15);
    const Matrix m = (Matrix(2, 2) << 1, -3, 2, 0).finished();
    CHECK(max_abs(m) == 3.0);
    CHECK(std::abs(frobenius(m) - std::sqrt(14.0)) < 1e-15);
}
