#include "symred/geomcore.hpp"

#include <cmath>
#include <string>

namespace symred {

ChartPoint::ChartPoint(Vector coords) : coords_(std::move(coords)) {
    if (!coords_.allFinite()) throw GeometryError(ErrorKind::NonFinite, "chart point has non-finite coordinates");
}

ChartPoint::ChartPoint(std::initializer_list<double> coords)
    : ChartPoint(Vector::Map(coords.begin(), static_cast<Index>(coords.size()))) {}

TangentVector::TangentVector(ChartPoint base, Vector components)
    : base_(std::move(base)), components_(std::move(components)) {
    if (components_.size() != base_.dim())
        throw GeometryError(ErrorKind::DimensionMismatch, "tangent vector length differs from base point dimension");
    if (!components_.allFinite()) throw GeometryError(ErrorKind::NonFinite, "tangent vector has non-finite components");
}

TensorField::TensorField(FieldArity arity, Index rows, Index cols, Fn fn)
    : arity_(arity), rows_(rows), cols_(cols), fn_(std::move(fn)) {
    if (arity_ == FieldArity::scalar && (rows_ != 1 || cols_ != 1))
        throw GeometryError(ErrorKind::DimensionMismatch, "scalar field must be 1x1");
    if (arity_ == FieldArity::vector && cols_ != 1)
        throw GeometryError(ErrorKind::DimensionMismatch, "vector field must have one column");
}

TensorField TensorField::constant(const Matrix& value) {
    return {FieldArity::matrix, value.rows(), value.cols(), [value](const Vector&) { return value; }};
}

TensorField TensorField::matrix(Index rows, Index cols, Fn fn) {
    return {FieldArity::matrix, rows, cols, std::move(fn)};
}

TensorField TensorField::scalar(std::function<double(const Vector&)> fn) {
    return {FieldArity::scalar, 1, 1, [fn = std::move(fn)](const Vector& p) {
                Matrix out(1, 1);
                out(0, 0) = fn(p);
                return out;
            }};
}

void FDConfig::validate() const {
    if (!(step > 0.0) || !std::isfinite(step))
        throw GeometryError(ErrorKind::DegenerateInput, "finite-difference step must be positive");
    if (order != 2 && order != 4)
        throw GeometryError(ErrorKind::DegenerateInput, "finite-difference order must be 2 or 4");
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

void require_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) throw GeometryError(ErrorKind::NonFinite, std::string(what) + " produced NaN/Inf");
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double frobenius(const Matrix& m) { return m.norm(); }

Matrix eval_field(const TensorField& field, const ChartPoint& p) {
    Matrix out = field(p.coords());
    if (out.rows() != field.rows() || out.cols() != field.cols())
        throw GeometryError(ErrorKind::DimensionMismatch, "field output shape differs from its declaration");
    require_finite(out, "field evaluation");
    return out;
}

double eval_scalar(const TensorField& field, const ChartPoint& p) {
    if (field.rows() != 1 || field.cols() != 1)
        throw GeometryError(ErrorKind::DimensionMismatch, "expected a scalar field");
    return eval_field(field, p)(0, 0);
}

namespace {

// Central-difference stencil along direction dir applied to any matrix-valued
// function of a point.
template <class F>
Matrix central_difference(F&& f, const Vector& p, const Vector& dir, const FDConfig& cfg) {
    const double h = cfg.step;
    if (cfg.order == 2) return (f(p + h * dir) - f(p - h * dir)) / (2.0 * h);
    return (-f(p + 2.0 * h * dir) + 8.0 * f(p + h * dir) - 8.0 * f(p - h * dir) + f(p - 2.0 * h * dir)) /
           (12.0 * h);
}

} // namespace

Matrix fd_jacobian(const ChartMap& map, const ChartPoint& p, const FDConfig& cfg) {
    cfg.validate();
    const Index n = p.dim();
    auto f = [&](const Vector& q) -> Matrix {
        Vector v = map(q);
        require_finite(v, "map evaluation");
        return v;
    };
    const Index m = f(p.coords()).size();
    Matrix jac(m, n);
    for (Index i = 0; i < n; ++i) {
        Vector e = Vector::Unit(n, i);
        jac.col(i) = central_difference(f, p.coords(), e, cfg);
    }
    require_finite(jac, "fd_jacobian");
    return jac;
}

Matrix fd_directional(const TensorField& field, const ChartPoint& p, const TangentVector& dir,
                      const FDConfig& cfg) {
    cfg.validate();
    if (dir.components().size() != p.dim())
        throw GeometryError(ErrorKind::DimensionMismatch, "direction length differs from point dimension");
    if (!(dir.components().norm() > 0.0))
        throw GeometryError(ErrorKind::DegenerateInput, "direction must be nonzero");
    auto f = [&](const Vector& q) -> Matrix {
        Matrix v = field(q);
        require_finite(v, "field evaluation");
        return v;
    };
    Matrix out = central_difference(f, p.coords(), dir.components(), cfg);
    require_finite(out, "fd_directional");
    return out;
}

Vector fd_gradient(const TensorField& field, const ChartPoint& p, const FDConfig& cfg) {
    if (field.rows() != 1 || field.cols() != 1)
        throw GeometryError(ErrorKind::DimensionMismatch, "gradient requires a scalar field");
    ChartMap as_map = [&field](const Vector& q) -> Vector { return field(q).reshaped(); };
    return fd_jacobian(as_map, p, cfg).row(0).transpose();
}

Matrix kernel_matrix(const Matrix& mat, double rank_tol) {
    require_finite(mat, "kernel_basis input");
    const Index n = mat.cols();
    if (n == 0) return Matrix(0, 0);
    if (mat.rows() == 0) return Matrix::Identity(n, n);
    Eigen::JacobiSVD<Matrix> svd(mat, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double smax = s.size() ? s(0) : 0.0;
    Index rank = 0;
    for (Index i = 0; i < s.size(); ++i)
        if (smax > 0.0 && s(i) >= rank_tol * smax) ++rank;
    return svd.matrixV().rightCols(n - rank);
}

std::vector<Vector> kernel_basis(const Matrix& mat, double rank_tol, bool require_positive_rank) {
    if (require_positive_rank && (mat.size() == 0 || max_abs(mat) == 0.0))
        throw GeometryError(ErrorKind::DegenerateInput, "matrix is zero but positive rank was required");
    Matrix k = kernel_matrix(mat, rank_tol);
    std::vector<Vector> out;
    out.reserve(static_cast<std::size_t>(k.cols()));
    for (Index j = 0; j < k.cols(); ++j) out.emplace_back(k.col(j));
    return out;
}

Matrix orthonormalize_columns(const Matrix& vectors, const Matrix& metric, double tol) {
    const Index n = vectors.rows();
    if (metric.rows() != n || metric.cols() != n)
        throw GeometryError(ErrorKind::DimensionMismatch, "metric size differs from vector length");
    Matrix basis(n, 0);
    for (Index j = 0; j < vectors.cols(); ++j) {
        Vector v = vectors.col(j);
        for (int pass = 0; pass < 2; ++pass) {
            for (Index b = 0; b < basis.cols(); ++b) {
                v -= (basis.col(b).dot(metric * v)) * basis.col(b);
            }
        }
        const double norm2 = v.dot(metric * v);
        if (!(norm2 > 0.0) || std::sqrt(norm2) < tol) continue;
        basis.conservativeResize(n, basis.cols() + 1);
        basis.col(basis.cols() - 1) = v / std::sqrt(norm2);
    }
    return basis;
}

std::vector<TangentVector> orthonormalize(std::span<const TangentVector> vectors, const Matrix& metric,
                                          double tol) {
    if (vectors.empty()) return {};
    const ChartPoint& base = vectors.front().base();
    Matrix cols(base.dim(), static_cast<Index>(vectors.size()));
    for (std::size_t j = 0; j < vectors.size(); ++j) cols.col(static_cast<Index>(j)) = vectors[j].components();
    Matrix q = orthonormalize_columns(cols, metric, tol);
    std::vector<TangentVector> out;
    for (Index j = 0; j < q.cols(); ++j) out.emplace_back(base, q.col(j));
    return out;
}

Matrix sqrt_inverse_spd(const Matrix& mat) {
    require_finite(mat, "sqrt_inverse_spd input");
    if (mat.rows() != mat.cols()) throw GeometryError(ErrorKind::DimensionMismatch, "matrix must be square");
    Matrix sym = 0.5 * (mat + mat.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
    const Vector& lambda = eig.eigenvalues();
    if (lambda.size() && !(lambda.minCoeff() > 0.0))
        throw GeometryError(ErrorKind::NotSPD, "matrix has a non-positive eigenvalue");
    const Matrix& v = eig.eigenvectors();
    return v * lambda.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();
}

double min_singular_value(const Matrix& mat) {
    if (mat.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(mat);
    return svd.singularValues().minCoeff();
}

Matrix standard_omega(Index dim) {
    if (dim % 2 != 0) throw GeometryError(ErrorKind::OddDimension, "standard form needs even dimension");
    Matrix w = Matrix::Zero(dim, dim);
    for (Index b = 0; b < dim; b += 2) {
        w(b, b + 1) = 1.0;
        w(b + 1, b) = -1.0;
    }
    return w;
}

Matrix standard_acs(Index dim) {
    if (dim % 2 != 0) throw GeometryError(ErrorKind::OddDimension, "standard structure needs even dimension");
    Matrix j = Matrix::Zero(dim, dim);
    for (Index b = 0; b < dim; b += 2) {
        j(b + 1, b) = 1.0;
        j(b, b + 1) = -1.0;
    }
    return j;
}

} // namespace symred
