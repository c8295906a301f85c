#pragma once

// Charts, points, tangent vectors, evaluable tensor fields, finite-difference
// differentials and metric-aware dense linear algebra.

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <vector>

#include "symred/errors.hpp"

namespace symred {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// A point in a single coordinate chart. Coordinates are ordered
// (x1, y1, ..., xn, yn) whenever a complex structure is involved.
class ChartPoint {
public:
    ChartPoint() = default;
    explicit ChartPoint(Vector coords);
    ChartPoint(std::initializer_list<double> coords);

    const Vector& coords() const noexcept { return coords_; }
    Index dim() const noexcept { return coords_.size(); }
    double operator[](Index i) const { return coords_[i]; }

private:
    Vector coords_;
};

class TangentVector {
public:
    TangentVector(ChartPoint base, Vector components);

    const ChartPoint& base() const noexcept { return base_; }
    const Vector& components() const noexcept { return components_; }

private:
    ChartPoint base_;
    Vector components_;
};

// Smooth map between chart coordinate spaces.
using ChartMap = std::function<Vector(const Vector&)>;

enum class FieldArity { scalar, vector, matrix };

// Evaluable field of fixed output shape. Scalars are 1x1, vectors are n x 1.
class TensorField {
public:
    using Fn = std::function<Matrix(const Vector&)>;

    TensorField() = default;
    TensorField(FieldArity arity, Index rows, Index cols, Fn fn);

    static TensorField constant(const Matrix& value);
    static TensorField matrix(Index rows, Index cols, Fn fn);
    static TensorField scalar(std::function<double(const Vector&)> fn);

    FieldArity arity() const noexcept { return arity_; }
    Index rows() const noexcept { return rows_; }
    Index cols() const noexcept { return cols_; }
    bool valid() const noexcept { return static_cast<bool>(fn_); }

    // Unchecked evaluation; prefer eval_field at API boundaries.
    Matrix operator()(const Vector& p) const { return fn_(p); }

private:
    FieldArity arity_ = FieldArity::matrix;
    Index rows_ = 0;
    Index cols_ = 0;
    Fn fn_;
};

struct FDConfig {
    double step = 1e-5;
    int order = 4;  // 2 or 4

    void validate() const;
};

// Shape- and finiteness-checked evaluation.
Matrix eval_field(const TensorField& field, const ChartPoint& p);
double eval_scalar(const TensorField& field, const ChartPoint& p);

// Entry (j, i) approximates d map_j / d x_i at p.
Matrix fd_jacobian(const ChartMap& map, const ChartPoint& p, const FDConfig& cfg);

// Directional derivative of a field along dir (not normalised).
Matrix fd_directional(const TensorField& field, const ChartPoint& p, const TangentVector& dir,
                      const FDConfig& cfg);

// Gradient of a scalar field as a column vector.
Vector fd_gradient(const TensorField& field, const ChartPoint& p, const FDConfig& cfg);

// Orthonormal null-space basis of mat. Singular values below
// rank_tol * sigma_max count as zero. Ordered by singular-value index.
std::vector<Vector> kernel_basis(const Matrix& mat, double rank_tol = 1e-8,
                                 bool require_positive_rank = false);
// Same basis packed as matrix columns.
Matrix kernel_matrix(const Matrix& mat, double rank_tol = 1e-8);

// Modified Gram-Schmidt in the inner product u^T G v with one
// reorthogonalisation pass. Vectors whose g-norm after projection drops
// below tol are discarded.
std::vector<TangentVector> orthonormalize(std::span<const TangentVector> vectors, const Matrix& metric,
                                          double tol);
Matrix orthonormalize_columns(const Matrix& vectors, const Matrix& metric, double tol);

// S symmetric positive definite with S*S = mat^{-1}.
Matrix sqrt_inverse_spd(const Matrix& mat);

// Smallest singular value (0 for empty matrices).
double min_singular_value(const Matrix& mat);

double max_abs(const Matrix& m);
double frobenius(const Matrix& m);
bool all_finite(const Matrix& m);
void require_finite(const Matrix& m, const char* what);

// Standard structures on R^{2n} in interleaved (x1, y1, ...) ordering:
// omega(d/dx, d/dy) = 1 and J d/dx = d/dy.
Matrix standard_omega(Index dim);
Matrix standard_acs(Index dim);

} // namespace symred
