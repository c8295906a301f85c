#pragma once

// Pointwise validation of metrics, symplectic forms and almost complex
// structures, and construction of compatible triples.
//
// Conventions: bilinear forms act as u^T M v and J acts on component
// vectors, so compatibility omega(u, Jv) = g(u, v) is the matrix identity
// Omega * J = G.

#include <span>

#include "symred/check.hpp"

namespace symred {

using StructureCheckResult = CheckResult;

struct CompatibleTriple {
    TensorField omega;
    TensorField metric;
    TensorField acs;
};

// Symmetric and positive definite: residual is max(|G - G^T|_max, PD penalty),
// where the penalty exceeds tol whenever lambda_min(G) <= tol.
CheckResult check_metric(const TensorField& g, std::span<const ChartPoint> points, double tol,
                         Execution exec = Execution::parallel);

// Antisymmetric with |det| > tol. Throws OddDimension for odd n.
CheckResult check_symplectic_pointwise(const TensorField& w, std::span<const ChartPoint> points, double tol,
                                       Execution exec = Execution::parallel);

// Max over i<j<k of |d_i W_jk + d_j W_ki + d_k W_ij|.
CheckResult check_closed(const TensorField& w, std::span<const ChartPoint> points, const FDConfig& cfg,
                         double tol, Execution exec = Execution::parallel);

// ||J^2 + I||_F.
CheckResult check_acs(const TensorField& j, std::span<const ChartPoint> points, double tol,
                      Execution exec = Execution::parallel);

// |Omega J - G|_max, i.e. omega(u, Jv) = g(u, v) on basis vectors.
CheckResult check_compatibility(const CompatibleTriple& t, std::span<const ChartPoint> points, double tol,
                                Execution exec = Execution::parallel);

// |J^T G - Omega|_max, the form omega(u, v) = g(Ju, v).
CheckResult check_compatibility_alt(const CompatibleTriple& t, std::span<const ChartPoint> points, double tol,
                                    Execution exec = Execution::parallel);

// Pointwise compatible triple obtained from (Omega, G0) by polar decomposition.
struct PolarTriple {
    Matrix endomorphism;  // A with omega(X, Y) = g0(AX, Y), i.e. A = -G0^{-1} Omega
    Matrix acs;           // J = P^{-1} A, P = sqrt(-A^2) in the g0 inner product
    Matrix metric;        // G = Omega J
};

PolarTriple polar_compatible_triple(const Matrix& omega, const Matrix& g0);

// Endomorphism field A defined by omega(X, Y) = g0(AX, Y).
TensorField endomorphism_field(const TensorField& w, const TensorField& g0);

// Triple whose J and metric are computed from (w, g0) pointwise. The omega
// field is w itself. Throws NotSPD when w is degenerate.
CompatibleTriple build_compatible_triple(const TensorField& w, const TensorField& g0);

} // namespace symred
