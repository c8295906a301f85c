#include "symred/holomorphy.hpp"

#include <cmath>
#include <complex>

namespace symred {

namespace {

void require_even(Index dim, const char* what) {
    if (dim <= 0 || dim % 2 != 0)
        throw GeometryError(ErrorKind::OddDimension, std::string(what) + " dimension must be positive and even");
}

} // namespace

ChartedMap ChartedMap::standard(Index source_dim, Index target_dim, ChartMap map) {
    require_even(source_dim, "source");
    require_even(target_dim, "target");
    return {source_dim, target_dim, std::move(map), TensorField::constant(standard_acs(source_dim)),
            TensorField::constant(standard_acs(target_dim))};
}

double almost_complex_residual(const ChartedMap& cm, const ChartPoint& p, const FDConfig& cfg) {
    require_even(cm.source_dim, "source");
    require_even(cm.target_dim, "target");
    if (p.dim() != cm.source_dim) throw GeometryError(ErrorKind::DimensionMismatch, "point is not in the source chart");
    const Matrix d = fd_jacobian(cm.map, p, cfg);
    const ChartPoint image(cm.map(p.coords()));
    return frobenius(d * eval_field(cm.source_acs, p) - eval_field(cm.target_acs, image) * d);
}

double cauchy_riemann_residual(const ChartedMap& cm, const ChartPoint& p, const FDConfig& cfg, double structure_tol) {
    require_even(cm.source_dim, "source");
    require_even(cm.target_dim, "target");
    if (p.dim() != cm.source_dim) throw GeometryError(ErrorKind::DimensionMismatch, "point is not in the source chart");
    const ChartPoint image(cm.map(p.coords()));
    if (max_abs(eval_field(cm.source_acs, p) - standard_acs(cm.source_dim)) > structure_tol ||
        max_abs(eval_field(cm.target_acs, image) - standard_acs(cm.target_dim)) > structure_tol)
        throw GeometryError(ErrorKind::NotStandardStructure, "Cauchy-Riemann form needs the coordinate structures");

    const Matrix d = fd_jacobian(cm.map, p, cfg);
    double worst = 0.0;
    for (Index i = 0; i < cm.source_dim / 2; ++i) {
        const Index x = 2 * i, y = 2 * i + 1;
        for (Index j = 0; j < cm.target_dim / 2; ++j) {
            const Index a = 2 * j, b = 2 * j + 1;
            worst = std::max(worst, std::abs(d(a, x) - d(b, y)));
            worst = std::max(worst, std::abs(d(a, y) + d(b, x)));
        }
    }
    return worst;
}

std::vector<ReferenceMap> reference_maps() {
    auto complex_map = [](auto f) {
        return [f](const Vector& p) {
            const std::complex<double> w = f(std::complex<double>(p(0), p(1)));
            return Vector((Vector(2) << w.real(), w.imag()).finished());
        };
    };
    using C = std::complex<double>;
    return {
        {"z^2", ChartedMap::standard(2, 2, complex_map([](C z) { return z * z; })), true},
        {"exp(z)", ChartedMap::standard(2, 2, complex_map([](C z) { return std::exp(z); })), true},
        {"1/(z-2)", ChartedMap::standard(2, 2, complex_map([](C z) { return 1.0 / (z - 2.0); })), true},
        {"conj(z)", ChartedMap::standard(2, 2, complex_map([](C z) { return std::conj(z); })), false},
    };
}

} // namespace symred
