#include "symred/reduction.hpp"

#include <cmath>
#include <random>

namespace symred {

void ReductionScenario::validate() {
    auto fail = [](const std::string& msg) { throw GeometryError(ErrorKind::ValidationError, msg); };
    if (chart_dim <= 0) fail("chart dimension must be positive");
    if (chart_dim % 2 != 0) throw GeometryError(ErrorKind::OddDimension, "symplectic chart must be even-dimensional");
    for (const auto* f : {&omega, &metric, &acs})
        if (!f->valid() || f->rows() != chart_dim || f->cols() != chart_dim)
            fail("omega, metric and acs must be " + std::to_string(chart_dim) + "x" + std::to_string(chart_dim));
    if (!action.flow) fail("action flow missing");
    if (action.group_dim <= 0) fail("group dimension must be positive");
    if (static_cast<int>(mu.components.size()) != action.group_dim)
        fail("momentum map needs one component per group parameter");
    if (mu.beta.size() != action.group_dim) fail("beta length differs from group dimension");
    if (!section) fail("section missing");
    if (quotient_dim < 0) fail("quotient dimension must be nonnegative");
    if (quotient_dim != chart_dim - 2 * action.group_dim)
        warnings.push_back("quotient_dim " + std::to_string(quotient_dim) + " differs from dim M - dim G - dim G_beta = " +
                           std::to_string(chart_dim - 2 * action.group_dim) + " for an abelian free action");
    if (quotient_domain.lower.size() != quotient_dim || quotient_domain.upper.size() != quotient_dim)
        fail("quotient sampling box must have quotient_dim entries");
    if (ambient_domain.lower.size() != chart_dim || ambient_domain.upper.size() != chart_dim)
        fail("ambient sampling box must have chart_dim entries");
}

ChartPoint project_to_level(const MomentumMapSpec& mu, const ChartPoint& guess, const ProjectionOptions& opts) {
    Vector m = guess.coords();
    for (int iter = 0; iter <= opts.max_iter; ++iter) {
        const ChartPoint p(m);
        const Vector r = mu.value(p) - mu.beta;
        if (r.cwiseAbs().maxCoeff() <= opts.tol) return p;
        if (iter == opts.max_iter) break;
        const Matrix jac = mu.jacobian(p, opts.fd);
        if (min_singular_value(jac) < opts.regular_tol)
            throw GeometryError(ErrorKind::NotRegularValue, "d mu is rank deficient near the level");
        m -= jac.completeOrthogonalDecomposition().solve(r);
        if (!m.allFinite()) throw GeometryError(ErrorKind::NoConvergence, "Gauss-Newton iterate diverged");
    }
    throw GeometryError(ErrorKind::NoConvergence, "level projection did not reach tolerance");
}

ChartPoint project_to_level(const MomentumMapSpec& mu, const ChartPoint& guess, double tol, int max_iter) {
    ProjectionOptions opts;
    opts.tol = tol;
    opts.max_iter = max_iter;
    return project_to_level(mu, guess, opts);
}

namespace {

// Relative threshold used by every orthonormalisation inside the splitting.
constexpr double kBasisTol = 1e-10;

} // namespace

SplitTangentSpace split_tangent(const ReductionScenario& scen, const ChartPoint& m, const FDConfig& cfg) {
    const Vector level_defect = scen.mu.value(m) - scen.mu.beta;
    if (level_defect.cwiseAbs().maxCoeff() >= kLevelTolerance)
        throw GeometryError(ErrorKind::NotOnLevel, "point is not on the momentum level");

    SplitTangentSpace out;
    out.base = m;
    const Matrix dmu = scen.mu.jacobian(m, cfg);
    out.level_tangent = kernel_matrix(dmu);
    out.vertical = generator_matrix(scen.action, m, cfg);
    if (min_singular_value(out.vertical) <= kFreeTolerance)
        throw GeometryError(ErrorKind::ActionNotFree, "orbit generators are linearly dependent");
    out.vertical_tangency = max_abs(dmu * out.vertical);

    const Matrix g = eval_field(scen.metric, m);
    const Matrix vhat = orthonormalize_columns(out.vertical, g, kBasisTol);
    // H = {u in ker d mu : g(u, V) = 0}.
    const Matrix coupling = vhat.transpose() * g * out.level_tangent;
    const Matrix coeffs = kernel_matrix(coupling);
    out.horizontal = orthonormalize_columns(out.level_tangent * coeffs, g, kBasisTol);
    return out;
}

LiftFrame::LiftFrame(const ReductionScenario& scen, const ChartPoint& x, const std::optional<Vector>& group_param,
                     const FDConfig& cfg, double constraint_tol) {
    if (x.dim() != scen.quotient_dim)
        throw GeometryError(ErrorKind::DimensionMismatch, "quotient point has wrong dimension");
    const Vector s = scen.section(x.coords());
    require_finite(s, "section");
    if (s.size() != scen.chart_dim) throw GeometryError(ErrorKind::DimensionMismatch, "section output has wrong length");
    const ChartPoint base(s);
    if ((scen.mu.value(base) - scen.mu.beta).cwiseAbs().maxCoeff() > constraint_tol)
        throw GeometryError(ErrorKind::SectionNotOnLevel, "section point is off the momentum level");

    const Index q = scen.quotient_dim;
    Matrix dsigma = q > 0 ? fd_jacobian(scen.section, x, cfg) : Matrix(scen.chart_dim, 0);
    if (group_param) {
        const ChartMap phi = scen.action.at(*group_param);
        point_ = ChartPoint(phi(s));
        section_push_ = fd_jacobian(phi, base, cfg) * dsigma;
    } else {
        point_ = base;
        section_push_ = dsigma;
    }

    split_ = split_tangent(scen, point_, cfg);
    metric_ = eval_field(scen.metric, point_);
    omega_ = eval_field(scen.omega, point_);
    acs_ = eval_field(scen.acs, point_);
    level_basis_g_ = orthonormalize_columns(split_.level_tangent, metric_, kBasisTol);

    const Matrix& h = split_.horizontal;
    if (h.cols() != q)
        throw GeometryError(ErrorKind::DimensionMismatch, "horizontal space dimension " + std::to_string(h.cols()) +
                                                              " differs from quotient dimension " + std::to_string(q));
    lifts_ = h * (h.transpose() * metric_ * section_push_);
    if (q == 0) return;

    const Matrix coeffs = h.transpose() * metric_ * lifts_;
    Eigen::JacobiSVD<Matrix> svd(coeffs);
    const auto& sv = svd.singularValues();
    if (!(sv(sv.size() - 1) > 1e-8 * std::max(1.0, sv(0))))
        throw GeometryError(ErrorKind::RankDeficientLift, "d pi restricted to H is not invertible");
    lift_lu_ = coeffs.partialPivLu();
    lift_residual_ = max_abs(push_forward(lifts_) - Matrix::Identity(q, q));
}

Vector LiftFrame::push_forward(const Vector& u) const {
    if (lifts_.cols() == 0) return Vector(0);
    return lift_lu_.solve(split_.horizontal.transpose() * metric_ * u);
}

Matrix LiftFrame::push_forward(const Matrix& u) const {
    if (lifts_.cols() == 0) return Matrix(0, u.cols());
    return lift_lu_.solve(split_.horizontal.transpose() * metric_ * u);
}

double LiftFrame::normal_leak(const Vector& u) const {
    const Vector normal = u - level_basis_g_ * (level_basis_g_.transpose() * metric_ * u);
    return std::sqrt(std::max(0.0, normal.dot(metric_ * normal)));
}

Matrix LiftFrame::reduced_metric() const { return lifts_.transpose() * metric_ * lifts_; }

Matrix LiftFrame::reduced_symplectic() const { return lifts_.transpose() * omega_ * lifts_; }

Matrix LiftFrame::reduced_acs(double* max_leak) const {
    const Matrix jl = acs_ * lifts_;
    if (max_leak) {
        *max_leak = 0.0;
        for (Index i = 0; i < jl.cols(); ++i) *max_leak = std::max(*max_leak, normal_leak(jl.col(i)));
    }
    return push_forward(jl);
}

ReducedStructures reduced_structures(const ReductionScenario& scen, const ChartPoint& x, const FDConfig& cfg) {
    const LiftFrame frame(scen, x, std::nullopt, cfg);
    ReducedStructures out;
    out.point = x;
    out.h_beta = frame.reduced_metric();
    out.omega_beta = frame.reduced_symplectic();
    out.j_beta = frame.reduced_acs(&out.normal_leak);
    return out;
}

Matrix reduced_metric(const ReductionScenario& scen, const ChartPoint& x, const FDConfig& cfg) {
    return LiftFrame(scen, x, std::nullopt, cfg).reduced_metric();
}

Matrix reduced_symplectic(const ReductionScenario& scen, const ChartPoint& x, const FDConfig& cfg) {
    return LiftFrame(scen, x, std::nullopt, cfg).reduced_symplectic();
}

Matrix reduced_acs(const ReductionScenario& scen, const ChartPoint& x, const FDConfig& cfg) {
    return LiftFrame(scen, x, std::nullopt, cfg).reduced_acs();
}

namespace {

// g-distance from u to span(basis).
double span_distance(const Vector& u, const Matrix& basis, const Matrix& g) {
    const Matrix q = orthonormalize_columns(basis, g, kBasisTol);
    const Vector rest = u - q * (q.transpose() * g * u);
    return std::sqrt(std::max(0.0, rest.dot(g * rest)));
}

double vertical_ad_residual(const ReductionScenario& scen, const ChartPoint& m, const Vector& a, const FDConfig& cfg,
                            const std::optional<Matrix>& target_vertical) {
    if ((scen.mu.value(m) - scen.mu.beta).cwiseAbs().maxCoeff() >= kLevelTolerance)
        throw GeometryError(ErrorKind::NotOnLevel, "point is not on the momentum level");
    const ChartMap phi = scen.action.at(a);
    const Matrix pushed = fd_jacobian(phi, m, cfg) * generator_matrix(scen.action, m, cfg);
    const ChartPoint target(phi(m.coords()));
    const Matrix vertical = target_vertical ? *target_vertical : generator_matrix(scen.action, target, cfg);
    const Matrix g = eval_field(scen.metric, target);
    double worst = 0.0;
    for (Index j = 0; j < pushed.cols(); ++j) worst = std::max(worst, span_distance(pushed.col(j), vertical, g));
    return worst;
}

bool is_identity_param(const Vector& a) { return a.size() == 0 || a.cwiseAbs().maxCoeff() == 0.0; }

std::optional<Vector> as_param(const Vector& a) {
    if (is_identity_param(a)) return std::nullopt;
    return a;
}

} // namespace

CheckResult check_vertical_ad_invariance(const ReductionScenario& scen, const ChartPoint& m, const Vector& group_param,
                                         const FDConfig& cfg, double tol, const std::optional<Matrix>& target_vertical) {
    CheckBuilder b("vertical_ad_invariance", "TΦ_a ξ_M = (Ad_a ξ)_M", tol);
    b.record(vertical_ad_residual(scen, m, group_param, cfg, target_vertical), m.coords());
    return b.finish();
}

VerificationReport verify_submersion(const ReductionScenario& scen, std::span<const ChartPoint> quotient_points,
                                     std::span<const Vector> fiber_params, const FDConfig& cfg, const Tolerances& tol,
                                     Execution exec) {
    struct PerPoint {
        double fiber = 0.0;
        double orthogonality = 0.0;
        double horizontal_in_level = 0.0;
        double vertical_tangency = 0.0;
        double dimension = 0.0;
        double lift = 0.0;
        double spd = 0.0;
        double vertical_ad = 0.0;
    };
    const Index n = scen.chart_dim;
    const Index k = scen.action.group_dim;
    auto rows = map_indexed<PerPoint>(
        quotient_points.size(),
        [&](std::size_t i) {
            const ChartPoint& x = quotient_points[i];
            PerPoint r;
            const LiftFrame frame0(scen, x, std::nullopt, cfg, tol.constraint);
            const Matrix h0 = frame0.reduced_metric();
            const auto& sp = frame0.split();
            r.orthogonality = max_abs(sp.horizontal.transpose() * frame0.metric() * sp.vertical);
            r.horizontal_in_level = max_abs(scen.mu.jacobian(frame0.point(), cfg) * sp.horizontal);
            r.vertical_tangency = sp.vertical_tangency;
            r.dimension = (sp.level_tangent.cols() == n - k && sp.vertical.cols() == k &&
                           sp.horizontal.cols() == n - 2 * k && scen.quotient_dim == n - 2 * k)
                              ? 0.0
                              : 1.0;
            r.lift = frame0.lift_residual();
            if (h0.size() > 0) {
                Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (h0 + h0.transpose()), Eigen::EigenvaluesOnly);
                const double lmin = eig.eigenvalues().minCoeff();
                r.spd = std::max(max_abs(h0 - h0.transpose()), lmin > 0.0 ? 0.0 : 1.0 - lmin);
            }
            for (const Vector& a : fiber_params) {
                r.vertical_ad = std::max(r.vertical_ad, vertical_ad_residual(scen, frame0.point(), a, cfg, std::nullopt));
                if (is_identity_param(a)) continue;
                const LiftFrame frame_a(scen, x, a, cfg, tol.constraint);
                r.fiber = std::max(r.fiber, max_abs(frame_a.reduced_metric() - h0));
            }
            return r;
        },
        exec);

    CheckBuilder fiber("fiber_independence", "h_x independent of m ∈ π⁻¹(x)", tol.geometric);
    CheckBuilder ortho("splitting_orthogonality", "T_mM_β = H ⊕ V, g(H,V) = 0", tol.algebraic);
    CheckBuilder inlevel("horizontal_in_level", "H ⊆ ker dμ", tol.geometric);
    CheckBuilder tangency("vertical_in_level", "ξ_M ∈ ker dμ", tol.geometric);
    CheckBuilder dims("dimension_counts", "dim M_β = dim M − dim G − dim G_β", 0.5);
    CheckBuilder lift("lift_solve", "dπ(ℓ̃_i) = e_i", tol.algebraic);
    CheckBuilder spd("reduced_metric_spd", "h_β symmetric positive definite", tol.algebraic);
    CheckBuilder vad("vertical_ad_invariance", "TΦ_a ξ_M = (Ad_a ξ)_M", tol.geometric);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Vector& at = quotient_points[i].coords();
        fiber.record(rows[i].fiber, at);
        ortho.record(rows[i].orthogonality, at);
        inlevel.record(rows[i].horizontal_in_level, at);
        tangency.record(rows[i].vertical_tangency, at);
        dims.record(rows[i].dimension, at);
        lift.record(rows[i].lift, at);
        spd.record(rows[i].spd, at);
        vad.record(rows[i].vertical_ad, at);
    }
    VerificationReport report;
    report.name = "submersion";
    for (auto* b : {&dims, &ortho, &inlevel, &tangency, &lift, &spd, &vad, &fiber}) report.checks.push_back(b->finish());
    return report;
}

VerificationReport verify_reduction_identity(const ReductionScenario& scen, std::span<const ChartPoint> quotient_points,
                                             std::uint64_t seed, std::size_t samples, const FDConfig& cfg,
                                             const Tolerances& tol, Execution exec) {
    if (quotient_points.empty()) throw GeometryError(ErrorKind::DegenerateInput, "no quotient points supplied");
    // Draw every random quantity up front so the kernel is order independent.
    struct Draw {
        Vector param;
        std::uint64_t coeff_seed = 0;
    };
    std::mt19937_64 rng(seed);
    const auto params = sample_group_params(scen.action, seed ^ 0x9e3779b97f4a7c15ULL, samples);
    std::vector<Draw> draws;
    draws.reserve(samples);
    for (std::size_t s = 0; s < samples; ++s) draws.push_back({params[s], rng()});

    struct PerSample {
        double identity = 0.0;
        double degeneracy = 0.0;
        double antisymmetry = 0.0;
        double nondegeneracy = 0.0;
    };
    auto rows = map_indexed<PerSample>(
        samples,
        [&](std::size_t s) {
            const ChartPoint& x = quotient_points[s % quotient_points.size()];
            const LiftFrame base(scen, x, std::nullopt, cfg, tol.constraint);
            const Matrix omega_beta = base.reduced_symplectic();
            const LiftFrame frame(scen, x, as_param(draws[s].param), cfg, tol.constraint);
            const Matrix& k = frame.split().level_tangent;

            std::mt19937_64 local(draws[s].coeff_seed);
            std::normal_distribution<double> normal;
            Vector cu(k.cols()), cv(k.cols());
            for (Index i = 0; i < k.cols(); ++i) cu(i) = normal(local);
            for (Index i = 0; i < k.cols(); ++i) cv(i) = normal(local);
            const Vector u = k * cu;
            const Vector v = k * cv;

            PerSample r;
            const double upstairs = u.dot(frame.omega() * v);
            const double downstairs = frame.push_forward(u).dot(omega_beta * frame.push_forward(v));
            r.identity = std::abs(upstairs - downstairs);
            r.degeneracy = max_abs(frame.split().vertical.transpose() * frame.omega() * k);
            r.antisymmetry = max_abs(omega_beta + omega_beta.transpose());
            if (omega_beta.size() > 0) {
                const double det = omega_beta.determinant();
                r.nondegeneracy = std::abs(det) > tol.algebraic ? 0.0 : 1.0;
            }
            return r;
        },
        exec);

    CheckBuilder ident("reduction_identity", "π_β*ω_β = i_β*ω", tol.geometric);
    CheckBuilder degen("vertical_degeneracy", "(T_m μ⁻¹(β))^ω = T_m(G·m)", tol.algebraic);
    CheckBuilder anti("reduced_symplectic_antisymmetric", "ω_β antisymmetric", tol.algebraic);
    CheckBuilder nondeg("reduced_symplectic_nondegenerate", "ω_β nondegenerate", 0.5);
    for (std::size_t s = 0; s < rows.size(); ++s) {
        const Vector& at = quotient_points[s % quotient_points.size()].coords();
        ident.record(rows[s].identity, at);
        degen.record(rows[s].degeneracy, at);
        anti.record(rows[s].antisymmetry, at);
        nondeg.record(rows[s].nondegeneracy, at);
    }
    VerificationReport report;
    report.name = "reduction_identity";
    for (auto* b : {&ident, &degen, &anti, &nondeg}) report.checks.push_back(b->finish());
    return report;
}

MainTheoremReport verify_main_theorem(const ReductionScenario& scen, std::span<const ChartPoint> quotient_points,
                                      std::span<const Vector> fiber_params, const FDConfig& cfg, const Tolerances& tol,
                                      Execution exec) {
    const Index q = scen.quotient_dim;
    auto samples = map_indexed<MainTheoremSample>(
        quotient_points.size(),
        [&](std::size_t i) {
            const ChartPoint& x = quotient_points[i];
            MainTheoremSample s;
            s.point = x;
            const LiftFrame frame0(scen, x, std::nullopt, cfg, tol.constraint);
            const Matrix h = frame0.reduced_metric();
            const Matrix w = frame0.reduced_symplectic();
            double leak = 0.0;
            const Matrix j = frame0.reduced_acs(&leak);
            s.normal_leak = leak;
            s.compat_residual = max_abs(w * j - h);
            s.acs_residual = frobenius(j * j + Matrix::Identity(q, q));
            s.hypothesis_compat = max_abs(frame0.omega() * frame0.acs() - frame0.metric());

            for (const Vector& a : fiber_params) {
                if (is_identity_param(a)) continue;
                const LiftFrame frame_a(scen, x, a, cfg, tol.constraint);
                double leak_a = 0.0;
                const Matrix j_a = frame_a.reduced_acs(&leak_a);
                s.acm_residual = std::max(s.acm_residual, frobenius(j_a - j));
                s.normal_leak = std::max(s.normal_leak, leak_a);
                s.hypothesis_compat =
                    std::max(s.hypothesis_compat, max_abs(frame_a.omega() * frame_a.acs() - frame_a.metric()));
                const Matrix d = fd_jacobian(scen.action.at(a), frame0.point(), cfg);
                s.hypothesis_isometry =
                    std::max(s.hypothesis_isometry, max_abs(d.transpose() * frame_a.metric() * d - frame0.metric()));
            }
            s.almost_complex = s.acm_residual <= tol.geometric && s.normal_leak <= tol.geometric;
            s.reduced_compatible = s.compat_residual <= tol.geometric;
            return s;
        },
        exec);

    MainTheoremReport out;
    CheckBuilder hyp_c("hypothesis_compatibility", "ω(X,Y) = g_M(J_M X,Y)", tol.algebraic);
    CheckBuilder hyp_i("hypothesis_isometry", "G acts by isometries", tol.geometric);
    CheckBuilder acm("almost_complex_mapping", "π_*∘J_M = J_β∘π_*", tol.geometric);
    CheckBuilder leak("normal_leak", "J_M H ⊆ T μ⁻¹(β)", tol.geometric);
    CheckBuilder compat("reduced_compatibility", "ω_β([u],[v]) = g_β(J_β[u],[v])", tol.geometric);
    CheckBuilder acs("reduced_acs_square", "J_β² = -id", tol.geometric);
    CheckBuilder iff("main_theorem_iff", "compatible reduced triple ⟺ π almost complex", 0.0);
    for (const auto& s : samples) {
        const Vector& at = s.point.coords();
        hyp_c.record(s.hypothesis_compat, at);
        hyp_i.record(s.hypothesis_isometry, at);
        acm.record(s.acm_residual, at);
        leak.record(s.normal_leak, at);
        compat.record(s.compat_residual, at);
        acs.record(s.acs_residual, at);
        iff.record(s.almost_complex == s.reduced_compatible ? 0.0 : 1.0, at);
    }
    CheckResult hc = hyp_c.finish();
    CheckResult hi = hyp_i.finish();
    out.hypothesis_violated = !hc.passed || !hi.passed;
    CheckResult leak_result = leak.finish();
    if (!leak_result.passed) leak_result.flags.push_back("vertical_leak");
    CheckResult iff_result = iff.finish();
    std::size_t agree_small = 0, agree_large = 0;
    for (const auto& s : samples) {
        if (s.almost_complex && s.reduced_compatible) ++agree_small;
        if (!s.almost_complex && !s.reduced_compatible) ++agree_large;
    }
    iff_result.details.emplace_back("both_hold", static_cast<double>(agree_small));
    iff_result.details.emplace_back("both_fail", static_cast<double>(agree_large));
    // The equivalence is only asserted under the hypotheses.
    if (out.hypothesis_violated) iff_result.flags.push_back("hypothesis_violated");
    out.report.name = "main_theorem";
    out.report.checks = {hc, hi, acm.finish(), leak_result, compat.finish(), acs.finish(), iff_result};
    out.samples = std::move(samples);
    return out;
}

} // namespace symred
