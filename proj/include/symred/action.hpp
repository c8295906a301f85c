#pragma once

// Lie group actions on a chart: infinitesimal generators, isometry and
// symplectomorphism checks, the Hamiltonian condition, invariant-metric
// averaging and invariance of endomorphism fields.
//
// Group elements are addressed by Lie algebra parameter vectors through a
// fixed exponential chart. Built-in groups are tori and R^k, so the
// exponential is surjective and Haar measure on a torus is uniform.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "symred/check.hpp"

namespace symred {

struct QuadratureNode {
    Vector params;
    double weight = 0.0;
};

struct GroupActionSpec {
    using Flow = std::function<Vector(const Vector& params, const Vector& p)>;

    int group_dim = 0;
    Flow flow;
    std::vector<std::string> algebra_basis;
    std::vector<QuadratureNode> quadrature;  // weights sum to 1; empty for noncompact groups
    std::vector<double> periods;             // per parameter; 0 marks a noncompact R factor
    bool abelian = true;

    // Phi_a as a chart map.
    ChartMap at(const Vector& params) const;
    bool compact() const;
};

// Tensor-product uniform rule on the torus (R / period Z)^k.
std::vector<QuadratureNode> uniform_torus_quadrature(int group_dim, int nodes_per_dim, double period);

// Seeded parameters: uniform over each period, uniform in [-1, 1] for R factors.
std::vector<Vector> sample_group_params(const GroupActionSpec& action, std::uint64_t seed, std::size_t count);

struct MomentumMapSpec {
    std::vector<TensorField> components;  // one scalar field per algebra basis element
    Vector beta;

    Vector value(const ChartPoint& p) const;
    // k x n Jacobian, rows are FD gradients of the components.
    Matrix jacobian(const ChartPoint& p, const FDConfig& cfg) const;
};

// xi_M(p) = d/dt Phi(exp t xi, p) at t = 0.
TangentVector generator(const GroupActionSpec& action, int xi_index, const ChartPoint& p, const FDConfig& cfg);
TangentVector generator(const GroupActionSpec& action, const Vector& xi, const ChartPoint& p, const FDConfig& cfg);
// Columns are the generators of the algebra basis.
Matrix generator_matrix(const GroupActionSpec& action, const ChartPoint& p, const FDConfig& cfg);

// Phi_0 = id.
CheckResult check_identity_axiom(const GroupActionSpec& action, std::span<const ChartPoint> points, double tol,
                                 Execution exec = Execution::parallel);
// Phi_s o Phi_t = Phi_{s+t} for abelian groups.
CheckResult check_abelian_composition(const GroupActionSpec& action, std::span<const Vector> params,
                                      std::span<const ChartPoint> points, double tol,
                                      Execution exec = Execution::parallel);

// |D^T G(Phi_a p) D - G(p)|_max with D = dPhi_a(p).
CheckResult check_isometry(const GroupActionSpec& action, const TensorField& g, std::span<const Vector> params,
                           std::span<const ChartPoint> points, const FDConfig& cfg, double tol,
                           Execution exec = Execution::parallel);
// Same with Omega in place of G.
CheckResult check_symplectomorphism(const GroupActionSpec& action, const TensorField& w,
                                    std::span<const Vector> params, std::span<const ChartPoint> points,
                                    const FDConfig& cfg, double tol, Execution exec = Execution::parallel);

// Hamiltonian condition omega(xi_M, .) = d mu_xi, i.e. |Omega^T xi_M - grad mu_i|_2.
CheckResult momentum_residual(const GroupActionSpec& action, const MomentumMapSpec& mu, const TensorField& w,
                              std::span<const ChartPoint> points, const FDConfig& cfg, double tol = 1e-8,
                              Execution exec = Execution::parallel);

// |mu_i(Phi_a p) - mu_i(p)|. For abelian groups coadjoint equivariance is
// invariance; nonabelian actions throw UnsupportedNonabelian.
CheckResult check_momentum_invariance(const GroupActionSpec& action, const MomentumMapSpec& mu,
                                      std::span<const Vector> params, std::span<const ChartPoint> points,
                                      double tol, Execution exec = Execution::parallel);

// g_bar(p) = sum_a w_a D_a^T G0(Phi_a p) D_a over the action's quadrature.
// Node contributions are computed by the chosen kernel and summed in node order.
TensorField average_metric(const TensorField& g0, const GroupActionSpec& action, const FDConfig& cfg,
                           Execution exec = Execution::parallel);

// |D F(p) - F(Phi_a p) D|_F for an endomorphism field F.
CheckResult check_field_invariance(const TensorField& field, const GroupActionSpec& action,
                                   std::span<const Vector> params, std::span<const ChartPoint> points,
                                   const FDConfig& cfg, double tol, Execution exec = Execution::parallel);

} // namespace symred
