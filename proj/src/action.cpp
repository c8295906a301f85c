#include "symred/action.hpp"

#include <cmath>
#include <random>

namespace symred {

ChartMap GroupActionSpec::at(const Vector& params) const {
    if (params.size() != group_dim)
        throw GeometryError(ErrorKind::DimensionMismatch, "group parameter vector has wrong length");
    return [flow = flow, params](const Vector& p) { return flow(params, p); };
}

bool GroupActionSpec::compact() const {
    if (static_cast<int>(periods.size()) != group_dim) return false;
    for (double period : periods)
        if (!(period > 0.0)) return false;
    return true;
}

std::vector<QuadratureNode> uniform_torus_quadrature(int group_dim, int nodes_per_dim, double period) {
    if (group_dim < 0 || nodes_per_dim < 1 || !(period > 0.0))
        throw GeometryError(ErrorKind::DegenerateInput, "invalid torus quadrature request");
    std::size_t total = 1;
    for (int d = 0; d < group_dim; ++d) total *= static_cast<std::size_t>(nodes_per_dim);
    const double weight = 1.0 / static_cast<double>(total);
    std::vector<QuadratureNode> out;
    out.reserve(total);
    for (std::size_t flat = 0; flat < total; ++flat) {
        Vector params(group_dim);
        std::size_t rest = flat;
        for (int d = 0; d < group_dim; ++d) {
            params(d) = period * static_cast<double>(rest % static_cast<std::size_t>(nodes_per_dim)) / nodes_per_dim;
            rest /= static_cast<std::size_t>(nodes_per_dim);
        }
        out.push_back({std::move(params), weight});
    }
    return out;
}

std::vector<Vector> sample_group_params(const GroupActionSpec& action, std::uint64_t seed, std::size_t count) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Vector> out;
    out.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
        Vector a(action.group_dim);
        for (int d = 0; d < action.group_dim; ++d) {
            const double period = d < static_cast<int>(action.periods.size()) ? action.periods[d] : 0.0;
            a(d) = period > 0.0 ? period * unit(rng) : 2.0 * unit(rng) - 1.0;
        }
        out.push_back(std::move(a));
    }
    return out;
}

Vector MomentumMapSpec::value(const ChartPoint& p) const {
    Vector out(static_cast<Index>(components.size()));
    for (std::size_t i = 0; i < components.size(); ++i) out(static_cast<Index>(i)) = eval_scalar(components[i], p);
    return out;
}

Matrix MomentumMapSpec::jacobian(const ChartPoint& p, const FDConfig& cfg) const {
    Matrix out(static_cast<Index>(components.size()), p.dim());
    for (std::size_t i = 0; i < components.size(); ++i)
        out.row(static_cast<Index>(i)) = fd_gradient(components[i], p, cfg).transpose();
    return out;
}

TangentVector generator(const GroupActionSpec& action, const Vector& xi, const ChartPoint& p, const FDConfig& cfg) {
    if (xi.size() != action.group_dim)
        throw GeometryError(ErrorKind::DimensionMismatch, "algebra element has wrong length");
    ChartMap curve = [&](const Vector& t) { return action.flow(t(0) * xi, p.coords()); };
    Matrix d = fd_jacobian(curve, ChartPoint{0.0}, cfg);
    return {p, d.col(0)};
}

TangentVector generator(const GroupActionSpec& action, int xi_index, const ChartPoint& p, const FDConfig& cfg) {
    if (xi_index < 0 || xi_index >= action.group_dim)
        throw GeometryError(ErrorKind::DimensionMismatch, "algebra index out of range");
    return generator(action, Vector(Vector::Unit(action.group_dim, xi_index)), p, cfg);
}

Matrix generator_matrix(const GroupActionSpec& action, const ChartPoint& p, const FDConfig& cfg) {
    Matrix out(p.dim(), action.group_dim);
    for (int i = 0; i < action.group_dim; ++i) out.col(i) = generator(action, i, p, cfg).components();
    return out;
}

namespace {

// Residual over all (param, point) pairs, param-major. residual_at receives
// the parameter index.
template <class Fn>
CheckResult pair_check(std::string name, std::string anchor, double tol, std::span<const Vector> params,
                       std::span<const ChartPoint> points, Fn&& residual_at, Execution exec) {
    const std::size_t total = params.size() * points.size();
    auto residuals = map_indexed<double>(
        total,
        [&](std::size_t i) { return residual_at(i / points.size(), points[i % points.size()]); }, exec);
    CheckBuilder b(std::move(name), std::move(anchor), tol);
    for (std::size_t i = 0; i < total; ++i) b.record(residuals[i], points[i % points.size()].coords());
    return b.finish();
}

Matrix pullback_defect(const GroupActionSpec& action, const TensorField& form, const Vector& a, const ChartPoint& p,
                       const FDConfig& cfg) {
    const ChartMap phi = action.at(a);
    const Matrix d = fd_jacobian(phi, p, cfg);
    const ChartPoint q(phi(p.coords()));
    return d.transpose() * eval_field(form, q) * d - eval_field(form, p);
}

} // namespace

CheckResult check_identity_axiom(const GroupActionSpec& action, std::span<const ChartPoint> points, double tol,
                                 Execution exec) {
    const Vector zero = Vector::Zero(action.group_dim);
    return pointwise_check(
        "identity_axiom", "Φ_e = id", tol, points,
        [&](const ChartPoint& p) { return (action.flow(zero, p.coords()) - p.coords()).cwiseAbs().maxCoeff(); },
        exec);
}

CheckResult check_abelian_composition(const GroupActionSpec& action, std::span<const Vector> params,
                                      std::span<const ChartPoint> points, double tol, Execution exec) {
    if (!action.abelian)
        throw GeometryError(ErrorKind::UnsupportedNonabelian, "composition law in exponential chart needs abelian G");
    // Pairs consecutive parameters (s, t) cyclically.
    return pair_check(
        "abelian_composition", "Φ_s∘Φ_t = Φ_{s+t}", tol, params, points,
        [&](std::size_t ia, const ChartPoint& p) {
            const Vector& s = params[ia];
            const Vector& t = params[(ia + 1) % params.size()];
            const Vector lhs = action.flow(s, action.flow(t, p.coords()));
            const Vector rhs = action.flow(s + t, p.coords());
            return (lhs - rhs).cwiseAbs().maxCoeff();
        },
        exec);
}

CheckResult check_isometry(const GroupActionSpec& action, const TensorField& g, std::span<const Vector> params,
                           std::span<const ChartPoint> points, const FDConfig& cfg, double tol, Execution exec) {
    return pair_check(
        "isometry", "g_m(u,v) = g_{Φ_a(m)}(TΦ_a u, TΦ_a v)", tol, params, points,
        [&](std::size_t ia, const ChartPoint& p) { return max_abs(pullback_defect(action, g, params[ia], p, cfg)); }, exec);
}

CheckResult check_symplectomorphism(const GroupActionSpec& action, const TensorField& w, std::span<const Vector> params,
                                    std::span<const ChartPoint> points, const FDConfig& cfg, double tol,
                                    Execution exec) {
    return pair_check(
        "symplectomorphism", "Φ_a*ω = ω", tol, params, points,
        [&](std::size_t ia, const ChartPoint& p) { return max_abs(pullback_defect(action, w, params[ia], p, cfg)); }, exec);
}

CheckResult momentum_residual(const GroupActionSpec& action, const MomentumMapSpec& mu, const TensorField& w,
                              std::span<const ChartPoint> points, const FDConfig& cfg, double tol, Execution exec) {
    if (static_cast<int>(mu.components.size()) != action.group_dim)
        throw GeometryError(ErrorKind::DimensionMismatch, "momentum map needs one component per algebra element");
    return pointwise_check(
        "momentum_map", "ω(ξ_M,·) = d⟨μ,ξ⟩", tol, points,
        [&](const ChartPoint& p) {
            const Matrix omega = eval_field(w, p);
            double worst = 0.0;
            for (int i = 0; i < action.group_dim; ++i) {
                const Vector xi = generator(action, i, p, cfg).components();
                const Vector grad = fd_gradient(mu.components[static_cast<std::size_t>(i)], p, cfg);
                worst = std::max(worst, (omega.transpose() * xi - grad).norm());
            }
            return worst;
        },
        exec);
}

CheckResult check_momentum_invariance(const GroupActionSpec& action, const MomentumMapSpec& mu,
                                      std::span<const Vector> params, std::span<const ChartPoint> points, double tol,
                                      Execution exec) {
    if (!action.abelian)
        throw GeometryError(ErrorKind::UnsupportedNonabelian,
                            "coadjoint equivariance for nonabelian groups is not supported");
    return pair_check(
        "momentum_invariance", "μ∘Φ_a = Ad*_a μ (abelian: μ∘Φ_a = μ)", tol, params, points,
        [&](std::size_t ia, const ChartPoint& p) {
            const ChartPoint q(action.flow(params[ia], p.coords()));
            return (mu.value(q) - mu.value(p)).cwiseAbs().maxCoeff();
        },
        exec);
}

TensorField average_metric(const TensorField& g0, const GroupActionSpec& action, const FDConfig& cfg, Execution exec) {
    if (action.quadrature.empty())
        throw GeometryError(ErrorKind::DegenerateInput, "averaging needs a quadrature over a compact group");
    double total_weight = 0.0;
    for (const auto& node : action.quadrature) total_weight += node.weight;
    if (std::abs(total_weight - 1.0) > 1e-12)
        throw GeometryError(ErrorKind::DegenerateInput, "quadrature weights must sum to 1");
    return TensorField::matrix(g0.rows(), g0.cols(), [g0, action, cfg, exec](const Vector& x) -> Matrix {
        const ChartPoint p(x);
        auto terms = map_indexed<Matrix>(
            action.quadrature.size(),
            [&](std::size_t i) -> Matrix {
                const auto& node = action.quadrature[i];
                const ChartMap phi = action.at(node.params);
                const Matrix d = fd_jacobian(phi, p, cfg);
                return node.weight * (d.transpose() * eval_field(g0, ChartPoint(phi(x))) * d);
            },
            exec);
        Matrix sum = Matrix::Zero(g0.rows(), g0.cols());
        for (const auto& t : terms) sum += t;
        return sum;
    });
}

CheckResult check_field_invariance(const TensorField& field, const GroupActionSpec& action,
                                   std::span<const Vector> params, std::span<const ChartPoint> points,
                                   const FDConfig& cfg, double tol, Execution exec) {
    return pair_check(
        "field_invariance", "TΦ_a∘F = F∘TΦ_a", tol, params, points,
        [&](std::size_t ia, const ChartPoint& p) {
            const ChartMap phi = action.at(params[ia]);
            const Matrix d = fd_jacobian(phi, p, cfg);
            const ChartPoint q(phi(p.coords()));
            return frobenius(d * eval_field(field, p) - eval_field(field, q) * d);
        },
        exec);
}

} // namespace symred
