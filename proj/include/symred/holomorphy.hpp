#pragma once

// Almost-complex-map and Cauchy-Riemann residuals between charted almost
// complex manifolds. Coordinates are interleaved (x1, y1, ..., xn, yn).

#include <string>
#include <vector>

#include "symred/geomcore.hpp"

namespace symred {

struct ChartedMap {
    Index source_dim = 0;
    Index target_dim = 0;
    ChartMap map;
    TensorField source_acs;
    TensorField target_acs;

    // Both sides carry the standard structure J d/dx = d/dy.
    static ChartedMap standard(Index source_dim, Index target_dim, ChartMap map);
};

// |D J1(p) - J2(phi(p)) D|_F with D the FD Jacobian of the map.
double almost_complex_residual(const ChartedMap& cm, const ChartPoint& p, const FDConfig& cfg);

// max over (i, j) of |da_j/dx_i - db_j/dy_i| and |da_j/dy_i + db_j/dx_i|,
// where (a_j, b_j) are the real and imaginary parts of the j-th output.
// Throws NotStandardStructure unless both structures are standard at p.
double cauchy_riemann_residual(const ChartedMap& cm, const ChartPoint& p, const FDConfig& cfg,
                               double structure_tol = 1e-12);

struct ReferenceMap {
    std::string name;
    ChartedMap map;
    bool holomorphic = false;
};

// z^2, e^z, 1/(z - 2) and complex conjugation on C = R^2.
std::vector<ReferenceMap> reference_maps();

} // namespace symred
