#include "symred/structures.hpp"

#include <cmath>
#include <limits>

namespace symred {

namespace {

void require_square(const TensorField& f, const char* what) {
    if (f.rows() != f.cols() || f.rows() == 0)
        throw GeometryError(ErrorKind::DimensionMismatch, std::string(what) + " must be a square matrix field");
}

// Penalty that exceeds tol exactly when value <= tol.
double threshold_penalty(double value, double tol) {
    if (value > tol) return 0.0;
    return std::nextafter(2.0 * tol - value, std::numeric_limits<double>::infinity());
}

} // namespace

CheckResult check_metric(const TensorField& g, std::span<const ChartPoint> points, double tol, Execution exec) {
    require_square(g, "metric");
    return pointwise_check(
        "metric_spd", "g symmetric positive definite", tol, points,
        [&](const ChartPoint& p) {
            Matrix m = eval_field(g, p);
            const double asym = max_abs(m - m.transpose());
            Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
            return std::max(asym, threshold_penalty(eig.eigenvalues().minCoeff(), tol));
        },
        exec);
}

CheckResult check_symplectic_pointwise(const TensorField& w, std::span<const ChartPoint> points, double tol,
                                       Execution exec) {
    require_square(w, "symplectic form");
    if (w.rows() % 2 != 0) throw GeometryError(ErrorKind::OddDimension, "symplectic form on odd-dimensional chart");
    auto results = map_indexed<std::pair<double, double>>(
        points.size(),
        [&](std::size_t i) {
            Matrix m = eval_field(w, points[i]);
            const double det = m.determinant();
            return std::pair{std::max(max_abs(m + m.transpose()), threshold_penalty(std::abs(det), tol)), det};
        },
        exec);
    CheckBuilder b("symplectic_pointwise", "ω antisymmetric and nondegenerate", tol);
    double min_abs_det = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
        b.record(results[i].first, points[i].coords());
        min_abs_det = std::min(min_abs_det, std::abs(results[i].second));
    }
    if (!points.empty()) b.detail("min_abs_det", min_abs_det);
    return b.finish();
}

CheckResult check_closed(const TensorField& w, std::span<const ChartPoint> points, const FDConfig& cfg, double tol,
                         Execution exec) {
    require_square(w, "symplectic form");
    const Index n = w.rows();
    return pointwise_check(
        "closed", "dω = 0", tol, points,
        [&](const ChartPoint& p) {
            std::vector<Matrix> d;
            d.reserve(static_cast<std::size_t>(n));
            for (Index i = 0; i < n; ++i) d.push_back(fd_directional(w, p, TangentVector(p, Vector::Unit(n, i)), cfg));
            double worst = 0.0;
            for (Index i = 0; i < n; ++i)
                for (Index j = i + 1; j < n; ++j)
                    for (Index k = j + 1; k < n; ++k) {
                        const double cyc = d[i](j, k) + d[j](k, i) + d[k](i, j);
                        worst = std::max(worst, std::abs(cyc));
                    }
            return worst;
        },
        exec);
}

CheckResult check_acs(const TensorField& j, std::span<const ChartPoint> points, double tol, Execution exec) {
    require_square(j, "almost complex structure");
    return pointwise_check(
        "acs_square", "J² = -id", tol, points,
        [&](const ChartPoint& p) {
            Matrix m = eval_field(j, p);
            return frobenius(m * m + Matrix::Identity(m.rows(), m.cols()));
        },
        exec);
}

namespace {

void require_same_dims(const CompatibleTriple& t) {
    require_square(t.omega, "omega");
    require_square(t.metric, "metric");
    require_square(t.acs, "acs");
    if (t.omega.rows() != t.metric.rows() || t.omega.rows() != t.acs.rows())
        throw GeometryError(ErrorKind::DimensionMismatch, "triple fields differ in dimension");
}

} // namespace

CheckResult check_compatibility(const CompatibleTriple& t, std::span<const ChartPoint> points, double tol,
                                Execution exec) {
    require_same_dims(t);
    return pointwise_check(
        "compatibility", "ω(u,Jv) = g(u,v)", tol, points,
        [&](const ChartPoint& p) {
            return max_abs(eval_field(t.omega, p) * eval_field(t.acs, p) - eval_field(t.metric, p));
        },
        exec);
}

CheckResult check_compatibility_alt(const CompatibleTriple& t, std::span<const ChartPoint> points, double tol,
                                    Execution exec) {
    require_same_dims(t);
    return pointwise_check(
        "compatibility_alt", "ω(u,v) = g(Ju,v)", tol, points,
        [&](const ChartPoint& p) {
            return max_abs(eval_field(t.acs, p).transpose() * eval_field(t.metric, p) - eval_field(t.omega, p));
        },
        exec);
}

PolarTriple polar_compatible_triple(const Matrix& omega, const Matrix& g0) {
    if (omega.rows() != g0.rows() || omega.cols() != g0.cols() || omega.rows() != omega.cols())
        throw GeometryError(ErrorKind::DimensionMismatch, "omega and g0 must be square of equal size");
    // Work in a g0-orthonormal frame, where A becomes antisymmetric and the
    // g0-self-adjoint square root is an ordinary SPD square root.
    const Matrix root_inv = sqrt_inverse_spd(g0);   // G0^{-1/2}
    const Matrix root = root_inv.inverse();          // G0^{1/2}
    const Matrix a_hat = -root_inv * omega * root_inv;
    const Matrix p_inv = sqrt_inverse_spd(a_hat.transpose() * a_hat);  // (-A^2)^{-1/2}
    const Matrix j_hat = p_inv * a_hat;

    PolarTriple out;
    out.endomorphism = root_inv * a_hat * root;
    out.acs = root_inv * j_hat * root;
    const Matrix g = omega * out.acs;
    out.metric = 0.5 * (g + g.transpose());
    return out;
}

TensorField endomorphism_field(const TensorField& w, const TensorField& g0) {
    require_square(w, "omega");
    require_square(g0, "g0");
    return TensorField::matrix(w.rows(), w.cols(), [w, g0](const Vector& p) -> Matrix {
        return -g0(p).partialPivLu().solve(w(p));
    });
}

CompatibleTriple build_compatible_triple(const TensorField& w, const TensorField& g0) {
    require_square(w, "omega");
    require_square(g0, "g0");
    if (w.rows() != g0.rows()) throw GeometryError(ErrorKind::DimensionMismatch, "omega and g0 differ in dimension");
    const Index n = w.rows();
    CompatibleTriple t;
    t.omega = w;
    t.acs = TensorField::matrix(n, n, [w, g0](const Vector& p) { return polar_compatible_triple(w(p), g0(p)).acs; });
    t.metric =
        TensorField::matrix(n, n, [w, g0](const Vector& p) { return polar_compatible_triple(w(p), g0(p)).metric; });
    return t;
}

} // namespace symred
