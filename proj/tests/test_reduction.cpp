#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "symred/reduction.hpp"
#include "symred/scenario.hpp"

using namespace symred;

namespace {

const FDConfig kFd{};

const std::vector<Vector> kFiber = {Vector::Zero(1), Vector::Constant(1, std::numbers::pi / 3),
                                    Vector::Constant(1, std::numbers::pi)};

std::vector<ChartPoint> disc_points(std::uint64_t seed, std::size_t count, double radius) {
    return SampleDomain{Vector::Constant(2, -radius), Vector::Constant(2, radius), radius}.sample(seed, count);
}

MomentumMapSpec half_norm(double beta) {
    return {{TensorField::scalar([](const Vector& p) { return 0.5 * p.squaredNorm(); })}, Vector::Constant(1, beta)};
}

Matrix std2() { return oracle::omega_std(2); }

bool all_pass(const VerificationReport& r) {
    for (const auto& c : r.checks) {
        CAPTURE(c.name);
        CAPTURE(c.max_residual);
        CHECK(c.passed);
    }
    return r.passed();
}

void expect_kind(ErrorKind kind, const std::function<void()>& fn) {
    try {
        fn();
        FAIL("expected " << to_string(kind));
    } catch (const GeometryError& e) {
        CHECK(e.kind() == kind);
    }
}

} // namespace

TEST_CASE("project_to_level examples") {
    const ChartPoint m = project_to_level(half_norm(0.5), ChartPoint{1.1, 0.0, 0.0, 0.0});
    CHECK((m.coords() - (Vector(4) << 1, 0, 0, 0).finished()).norm() < 1e-9);

    const ChartPoint on{0.6, 0.0, 0.0, 0.8};
    CHECK(project_to_level(half_norm(0.5), on).coords() == on.coords());

    expect_kind(ErrorKind::NotRegularValue, [] { project_to_level(half_norm(0.0), ChartPoint{0.1, 0.0, 0.0, 0.0}); });
}

TEST_CASE("property: projection lands on the level for random guesses") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto mu = half_norm(0.5);
    for (int trial = 0; trial < 50; ++trial) {
        Vector g(4);
        for (Index i = 0; i < 4; ++i) g(i) = u(rng);
        g *= (0.8 + 0.4 * (u(rng) + 1.0) / 2.0) / g.norm();
        const ChartPoint m = project_to_level(mu, ChartPoint(g));
        CHECK(std::abs(mu.value(m)(0) - 0.5) <= 1e-9);
    }
}

TEST_CASE("split_tangent examples") {
    const auto hopf = builtin("hopf");
    const auto sp = split_tangent(hopf, ChartPoint{1.0, 0.0, 0.0, 0.0}, kFd);
    CHECK(sp.level_tangent.cols() == 3);
    REQUIRE(sp.vertical.cols() == 1);
    CHECK((sp.vertical.col(0) - (Vector(4) << 0, -1, 0, 0).finished()).norm() < 1e-9);
    REQUIRE(sp.horizontal.cols() == 2);
    const Matrix hproj = sp.horizontal * sp.horizontal.transpose();
    Matrix expected = Matrix::Zero(4, 4);
    expected(2, 2) = expected(3, 3) = 1.0;
    CHECK(max_abs(hproj - expected) < 1e-9);

    const auto lin = builtin("linear_translation");
    const auto sl = split_tangent(lin, ChartPoint{0.0, 0.0, 0.0, 0.0}, kFd);
    REQUIRE(sl.vertical.cols() == 1);
    CHECK((sl.vertical.col(0) - (Vector(4) << 1, 0, 0, 0).finished()).norm() < 1e-10);
    CHECK(max_abs(sl.horizontal * sl.horizontal.transpose() - expected) < 1e-10);

    expect_kind(ErrorKind::NotOnLevel, [&] { split_tangent(hopf, ChartPoint{1.2, 0.0, 0.0, 0.0}, kFd); });
}

TEST_CASE("property: split tangent spaces are orthogonal with the right dimensions") {
    const auto hopf = builtin("hopf");
    std::mt19937_64 rng(4);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 30; ++trial) {
        Vector z(4);
        for (Index i = 0; i < 4; ++i) z(i) = nd(rng);
        const ChartPoint m(Vector(z / z.norm()));
        const auto sp = split_tangent(hopf, m, kFd);
        CHECK(sp.level_tangent.cols() == 3);
        CHECK(sp.vertical.cols() == 1);
        CHECK(sp.horizontal.cols() == 2);
        const Matrix g = eval_field(hopf.metric, m);
        CHECK(max_abs(sp.horizontal.transpose() * g * sp.vertical) < 1e-9);
        CHECK(max_abs(sp.horizontal.transpose() * g * sp.horizontal - Matrix::Identity(2, 2)) < 1e-9);
        CHECK(max_abs(m.coords().transpose() * sp.horizontal) < 1e-9);
    }
}

TEST_CASE("check_vertical_ad_invariance examples") {
    const auto hopf = builtin("hopf");
    const ChartPoint m{1.0, 0.0, 0.0, 0.0};
    CHECK(check_vertical_ad_invariance(hopf, m, Vector::Constant(1, std::numbers::pi / 3), kFd, 1e-8).max_residual < 1e-8);

    const auto lin = builtin("linear_translation");
    for (double s : {-0.7, 0.3, 1.0}) {
        const auto r = check_vertical_ad_invariance(lin, ChartPoint{0.2, 0.0, 0.1, -0.4}, Vector::Constant(1, s), kFd, 1e-10);
        CHECK(r.max_residual < 1e-10);
    }

    const Matrix corrupted = (Matrix(4, 1) << 0, 0, 1, 0).finished();
    const auto bad = check_vertical_ad_invariance(hopf, m, Vector::Constant(1, std::numbers::pi / 3), kFd, 1e-8, corrupted);
    CHECK_FALSE(bad.passed);
    CHECK(bad.max_residual > 0.5);
}

TEST_CASE("reduced structures on the Hopf scenario at the pole and at |w| = 1") {
    const auto hopf = builtin("hopf");
    const ChartPoint pole{0.0, 0.0};
    CHECK(max_abs(reduced_metric(hopf, pole, kFd) - Matrix::Identity(2, 2)) < 1e-6);
    CHECK(max_abs(reduced_symplectic(hopf, pole, kFd) - std2()) < 1e-6);
    CHECK(max_abs(reduced_acs(hopf, pole, kFd) - oracle::acs_std(2)) < 1e-6);

    const ChartPoint unit{1.0, 0.0};
    CHECK(max_abs(reduced_metric(hopf, unit, kFd) - 0.25 * Matrix::Identity(2, 2)) < 1e-5);
    CHECK(max_abs(reduced_symplectic(hopf, unit, kFd) - 0.25 * std2()) < 1e-5);
}

TEST_CASE("reduced structures on the linear scenario are the flat factor") {
    const auto lin = builtin("linear_translation");
    for (const auto& x : disc_points(5, 10, 1.0)) {
        CHECK(max_abs(reduced_metric(lin, x, kFd) - Matrix::Identity(2, 2)) < 1e-10);
        CHECK(max_abs(reduced_symplectic(lin, x, kFd) - std2()) < 1e-10);
        CHECK(max_abs(reduced_acs(lin, x, kFd) - oracle::acs_std(2)) < 1e-10);
    }
}

TEST_CASE("skewed metric keeps the pushed J but breaks reduced compatibility") {
    const auto skew = builtin("skewed_metric_hopf");
    const ChartPoint pole{0.0, 0.0};
    const auto rs = reduced_structures(skew, pole, kFd);
    CHECK(max_abs(rs.j_beta - oracle::acs_std(2)) < 1e-6);
    CHECK(max_abs(rs.h_beta - 4.0 * Matrix::Identity(2, 2)) < 1e-6);
    CHECK(max_abs(rs.omega_beta - std2()) < 1e-6);
    CHECK(std::abs(max_abs(rs.omega_beta * rs.j_beta - rs.h_beta) - 3.0) < 1e-6);

    const std::vector<ChartPoint> pts{pole};
    const auto mt = verify_main_theorem(skew, pts, kFiber, kFd, Tolerances{});
    REQUIRE(mt.samples.size() == 1);
    CHECK(std::abs(mt.samples[0].compat_residual - 3.0) < 1e-6);
    CHECK(mt.hypothesis_violated);
    CHECK_FALSE(mt.report.passed());
}

TEST_CASE("property: Hopf reduced quantities match the round-sphere formulas on |w| <= 2") {
    const auto hopf = builtin("hopf");
    for (const auto& x : disc_points(6, 40, 2.0)) {
        const auto rs = reduced_structures(hopf, x, kFd);
        CAPTURE(x.coords().transpose());
        CHECK(max_abs(rs.h_beta - oracle::hopf_metric(x.coords())) < 1e-5);
        CHECK(max_abs(rs.omega_beta - oracle::hopf_form(x.coords())) < 1e-5);
        CHECK(max_abs(rs.j_beta - oracle::acs_std(2)) < 1e-5);
    }
}

TEST_CASE("verify_submersion examples") {
    const Tolerances tol;
    const auto hopf = builtin("hopf");
    const auto hq = disc_points(7, 20, 2.0);
    const auto hr = verify_submersion(hopf, hq, kFiber, kFd, tol);
    CHECK(all_pass(hr));
    for (const auto& c : hr.checks) CHECK(c.max_residual < 1e-6);

    const auto lin = builtin("linear_translation");
    const std::vector<Vector> shifts = {Vector::Zero(1), Vector::Constant(1, 1.0 / 3), Vector::Ones(1)};
    const auto lr = verify_submersion(lin, disc_points(8, 20, 1.0), shifts, kFd, tol);
    CHECK(all_pass(lr));
    for (const auto& c : lr.checks) CHECK(c.max_residual < 1e-10);

    const auto bad = verify_submersion(builtin("noninvariant_metric_hopf"), hq, kFiber, kFd, tol);
    const auto* fiber = bad.find("fiber_independence");
    REQUIRE(fiber != nullptr);
    CHECK(fiber->max_residual > 1e-3);
    CHECK_FALSE(fiber->passed);
}

TEST_CASE("verify_reduction_identity examples") {
    const Tolerances tol;
    const auto hopf = builtin("hopf");
    const auto hr = verify_reduction_identity(hopf, disc_points(9, 50, 2.0), 11, 50, kFd, tol);
    CHECK(all_pass(hr));
    CHECK(hr.find("reduction_identity")->max_residual < 1e-6);
    CHECK(hr.find("vertical_degeneracy")->max_residual < 1e-8);

    const auto lr = verify_reduction_identity(builtin("linear_translation"), disc_points(10, 20, 1.0), 12, 20, kFd, tol);
    CHECK(all_pass(lr));
    CHECK(lr.find("reduction_identity")->max_residual < 1e-10);
}

TEST_CASE("verify_main_theorem examples") {
    const Tolerances tol;
    const auto hopf = builtin("hopf");
    const auto hm = verify_main_theorem(hopf, disc_points(13, 20, 2.0), kFiber, kFd, tol);
    CHECK(all_pass(hm.report));
    CHECK_FALSE(hm.hypothesis_violated);
    for (const auto& s : hm.samples) {
        CHECK(s.acm_residual < 1e-6);
        CHECK(s.compat_residual < 1e-6);
        CHECK(s.acs_residual < 1e-6);
        CHECK(s.almost_complex);
        CHECK(s.reduced_compatible);
    }

    const std::vector<Vector> shifts = {Vector::Zero(1), Vector::Constant(1, 1.0 / 3), Vector::Ones(1)};
    const auto lm = verify_main_theorem(builtin("linear_translation"), disc_points(14, 10, 1.0), shifts, kFd, tol);
    CHECK(all_pass(lm.report));
    for (const auto& s : lm.samples) {
        CHECK(s.acm_residual < 1e-10);
        CHECK(s.compat_residual < 1e-10);
        CHECK(s.acs_residual < 1e-10);
    }
}

TEST_CASE("property: valid scenarios give SPD metrics, nondegenerate forms and the reduction identity") {
    const Tolerances tol;
    for (const std::string name : {"hopf", "linear_translation", "euclidean_r2n:3", "euclidean_r2n:4"}) {
        CAPTURE(name);
        const auto scen = builtin(name);
        const auto pts = scen.quotient_domain.sample(15, 12);
        for (const auto& x : pts) {
            const auto rs = reduced_structures(scen, x, kFd);
            const Matrix h = rs.h_beta;
            CHECK(max_abs(h - h.transpose()) < 1e-9);
            CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(h).eigenvalues().minCoeff() > 0.0);
            CHECK(max_abs(rs.omega_beta + rs.omega_beta.transpose()) < 1e-9);
            CHECK(std::abs(rs.omega_beta.determinant()) > 1e-6);
        }
        const auto ri = verify_reduction_identity(scen, pts, 16, 30, kFd, tol);
        CHECK(ri.find("reduction_identity")->max_residual < 1e-5);
        CHECK(ri.find("vertical_degeneracy")->max_residual < 1e-8);
    }
}

TEST_CASE("property: lifts solve the quotient system and h is fiber independent") {
    const auto hopf = builtin("hopf");
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (const auto& x : disc_points(18, 20, 2.0)) {
        const LiftFrame base(hopf, x, std::nullopt, kFd);
        CHECK(base.lift_residual() < 1e-10);
        const Vector a = Vector::Constant(1, angle(rng));
        const LiftFrame moved(hopf, x, a, kFd);
        CHECK(moved.lift_residual() < 1e-10);
        CHECK(max_abs(moved.reduced_metric() - base.reduced_metric()) < 1e-5);
    }
}

TEST_CASE("serial and parallel pipelines produce identical reports") {
    const Tolerances tol;
    const auto hopf = builtin("hopf");
    const auto pts = disc_points(19, 24, 2.0);
    const auto s = verify_submersion(hopf, pts, kFiber, kFd, tol, Execution::serial);
    const auto p = verify_submersion(hopf, pts, kFiber, kFd, tol, Execution::parallel);
    REQUIRE(s.checks.size() == p.checks.size());
    for (std::size_t i = 0; i < s.checks.size(); ++i) {
        CHECK(s.checks[i].max_residual == p.checks[i].max_residual);
        CHECK(s.checks[i].worst_point == p.checks[i].worst_point);
    }
    const auto ms = verify_main_theorem(hopf, pts, kFiber, kFd, tol, Execution::serial);
    const auto mp = verify_main_theorem(hopf, pts, kFiber, kFd, tol, Execution::parallel);
    for (std::size_t i = 0; i < ms.samples.size(); ++i) CHECK(ms.samples[i].acm_residual == mp.samples[i].acm_residual);
}
