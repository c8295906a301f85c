#pragma once

// Symplectic reduction in a chart: level sets of the momentum map, the
// vertical/horizontal splitting, the reduced metric, symplectic form and
// almost complex structure, and the verification pipelines built on them.
//
// The differential of the quotient map is never formed globally. At a level
// point m it is realised through a local section sigma: the columns of
// d sigma (transported by dPhi_a when m = Phi_a(sigma(x))) map to the
// quotient basis, their g-orthogonal projections onto H are the horizontal
// lifts, and d pi(u) solves the lift system for the H-component of u.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "symred/action.hpp"
#include "symred/check.hpp"
#include "symred/structures.hpp"

namespace symred {

struct ReductionScenario {
    std::string name;
    Index chart_dim = 0;
    TensorField omega;
    TensorField metric;
    TensorField acs;
    GroupActionSpec action;
    MomentumMapSpec mu;
    Index quotient_dim = 0;
    ChartMap section;               // quotient chart -> level set
    SampleDomain quotient_domain;   // section domain used for sampling
    SampleDomain ambient_domain;    // used by the pointwise structure checks
    std::vector<std::string> warnings;

    CompatibleTriple triple() const { return {omega, metric, acs}; }
    // Throws ValidationError on inconsistent dimensions; appends warnings.
    void validate();
};

// Points with |mu - beta| below this are on the level.
inline constexpr double kLevelTolerance = 1e-8;
// Generators with smallest singular value below this make the action non-free.
inline constexpr double kFreeTolerance = 1e-8;

struct SplitTangentSpace {
    ChartPoint base;
    Matrix level_tangent;       // n x (n-k), Euclidean-orthonormal basis of ker d mu
    Matrix vertical;            // n x k, generators xi_M(m)
    Matrix horizontal;          // n x (n-2k), g-orthonormal basis of H
    double vertical_tangency = 0.0;  // max |d mu . xi_M|
};

struct ProjectionOptions {
    double tol = 1e-9;
    int max_iter = 50;
    double regular_tol = 1e-3;  // sigma_min(d mu) below this means beta is not regular here
    FDConfig fd{};
};

// Gauss-Newton projection of guess onto mu^{-1}(beta).
ChartPoint project_to_level(const MomentumMapSpec& mu, const ChartPoint& guess, const ProjectionOptions& opts = {});
ChartPoint project_to_level(const MomentumMapSpec& mu, const ChartPoint& guess, double tol, int max_iter);

SplitTangentSpace split_tangent(const ReductionScenario& scen, const ChartPoint& m, const FDConfig& cfg);

// Lift machinery at one point of the fibre over x.
class LiftFrame {
public:
    // m = Phi_a(sigma(x)); a = nullopt means m = sigma(x).
    LiftFrame(const ReductionScenario& scen, const ChartPoint& x, const std::optional<Vector>& group_param,
              const FDConfig& cfg, double constraint_tol = 1e-9);

    const ChartPoint& point() const { return point_; }
    const SplitTangentSpace& split() const { return split_; }
    const Matrix& metric() const { return metric_; }
    const Matrix& omega() const { return omega_; }
    const Matrix& acs() const { return acs_; }
    const Matrix& section_pushforward() const { return section_push_; }
    // Columns are the horizontal lifts of the quotient basis vectors.
    const Matrix& lifts() const { return lifts_; }
    // |d pi(lift_i) - e_i|_max.
    double lift_residual() const { return lift_residual_; }

    // d pi(u) for u tangent to the level.
    Vector push_forward(const Vector& u) const;
    Matrix push_forward(const Matrix& u) const;
    // g-norm of the component of u that is g-orthogonal to the level.
    double normal_leak(const Vector& u) const;

    Matrix reduced_metric() const;
    Matrix reduced_symplectic() const;
    // Columns d pi(J_M lift_i). Also reports the largest normal leak.
    Matrix reduced_acs(double* max_leak = nullptr) const;

private:
    ChartPoint point_;
    SplitTangentSpace split_;
    Matrix metric_;
    Matrix omega_;
    Matrix acs_;
    Matrix section_push_;
    Matrix lifts_;
    Matrix level_basis_g_;   // g-orthonormal basis of ker d mu
    Eigen::PartialPivLU<Matrix> lift_lu_;  // coefficients of the lifts in the horizontal basis
    double lift_residual_ = 0.0;
};

struct ReducedStructures {
    ChartPoint point;
    Matrix h_beta;
    Matrix omega_beta;
    Matrix j_beta;
    double normal_leak = 0.0;
};

ReducedStructures reduced_structures(const ReductionScenario& scen, const ChartPoint& x, const FDConfig& cfg);
Matrix reduced_metric(const ReductionScenario& scen, const ChartPoint& x, const FDConfig& cfg);
Matrix reduced_symplectic(const ReductionScenario& scen, const ChartPoint& x, const FDConfig& cfg);
Matrix reduced_acs(const ReductionScenario& scen, const ChartPoint& x, const FDConfig& cfg);

// g-distance from dPhi_a xi_M(m) to the vertical space at Phi_a(m).
// target_vertical overrides the vertical basis at Phi_a(m) (negative controls).
CheckResult check_vertical_ad_invariance(const ReductionScenario& scen, const ChartPoint& m, const Vector& group_param,
                                         const FDConfig& cfg, double tol,
                                         const std::optional<Matrix>& target_vertical = std::nullopt);

// Riemannian submersion: fibre independence of h_x, orthogonality of the
// splitting, dimension counts, lift solve residual, reduced metric SPD.
VerificationReport verify_submersion(const ReductionScenario& scen, std::span<const ChartPoint> quotient_points,
                                     std::span<const Vector> fiber_params, const FDConfig& cfg,
                                     const Tolerances& tol, Execution exec = Execution::parallel);

// pi*omega_beta = i*omega on random level-tangent pairs at random fibre points,
// plus degeneracy of omega along the orbit directions.
VerificationReport verify_reduction_identity(const ReductionScenario& scen,
                                             std::span<const ChartPoint> quotient_points, std::uint64_t seed,
                                             std::size_t samples, const FDConfig& cfg, const Tolerances& tol,
                                             Execution exec = Execution::parallel);

struct MainTheoremSample {
    ChartPoint point;
    double acm_residual = 0.0;     // max_a |J_beta^(a) - J_beta|_F across the fibre
    double normal_leak = 0.0;      // J_M lift leaving the level
    double compat_residual = 0.0;  // |Omega_beta J_beta - H_beta|_max
    double acs_residual = 0.0;     // |J_beta^2 + I|_F
    double hypothesis_compat = 0.0;
    double hypothesis_isometry = 0.0;
    bool almost_complex = false;
    bool reduced_compatible = false;
};

struct MainTheoremReport {
    VerificationReport report;
    std::vector<MainTheoremSample> samples;
    bool hypothesis_violated = false;
};

// Almost-complex-mapping condition versus compatibility of the reduced
// triple; the equivalence holds at a sample when both are within tolerance
// or both are not.
MainTheoremReport verify_main_theorem(const ReductionScenario& scen, std::span<const ChartPoint> quotient_points,
                                      std::span<const Vector> fiber_params, const FDConfig& cfg, const Tolerances& tol,
                                      Execution exec = Execution::parallel);

} // namespace symred
