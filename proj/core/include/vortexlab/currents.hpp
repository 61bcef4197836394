#pragma once

#include <vector>

#include "vortexlab/s1field.hpp"

namespace vortexlab {

/// Diffuse and singular parts of the current carried by an S^1 field:
/// the diffuse part is pi * perp(grad phi) per cell, the singular part lives
/// on fractional jump edges with density (1/2) sin(2 pi (w- - w+)) per unit
/// length. Densities are signed with respect to the edge's dual tangent,
/// tau = perp(edge direction).
struct CurrentDecomposition {
    VectorGridField diffuse;
    std::vector<JumpEdge> singular_edges;   // the fractional jump edges
    std::vector<double> singular_density;   // parallel to singular_edges
};

struct Circle {
    Vec2 center;
    double radius{0.0};
    int samples{0};  // 0: choose max(64, ceil(8 * 2 pi r / h)) automatically
};

/// lambda_u = (1/2)(-u1 d2 u2 + u2 d2 u1, u1 d1 u2 - u2 d1 u1) per cell,
/// from jump-corrected differences. Equals perp(j(u)) cellwise.
VectorGridField prejacobian_lambda(const S1GridField& u);

/// j(u) = (1/2)(u1 grad u2 - u2 grad u1) per cell.
VectorGridField current_j(const S1GridField& u);

CurrentDecomposition t_current(const S1GridField& u);

/// Winding number of u along the circle; throws when the circle exits the
/// domain or the angular residual after rounding exceeds 0.05.
int degree_on_circle(const S1GridField& u, const Circle& c);

/// <Ju, test> = integral of grad(test) . dT_u; test must vanish on a band of
/// width >= 2h inside the boundary.
double jacobian_pairing(const S1GridField& u, const ScalarGridField& test);

/// |T_u - T_v|(Omega): cellwise diffuse mass difference plus edgewise
/// singular density differences (edges present in one field only contribute
/// their full density).
double current_mass_distance(const S1GridField& u, const S1GridField& v);

}  // namespace vortexlab
