#pragma once

#include "vortexlab/fields.hpp"
#include "vortexlab/measures.hpp"

namespace vortexlab {

struct PoissonResult {
    ScalarGridField solution;
    int iterations{0};
    double relative_residual{0.0};
};

/// Solves -Laplace(v) = f with v = 0 on the boundary by conjugate gradients
/// on the 5-point stencil. f and v are nodal; boundary nodes of f are
/// ignored. Throws on non-convergence (residual reported in the message).
PoissonResult solve_dirichlet(const ScalarGridField& f, double rel_tol = 1e-10);

/// Cell-centered gradient of a nodal field.
VectorGridField nodal_gradient(const ScalarGridField& v);

/// ||f||_{H^-1(Omega)} = (sum over cells of |grad v|^2 h^2)^{1/2} with v the
/// Dirichlet solution above.
double h_minus1_norm(const ScalarGridField& f);

/// Nodal load vector for an atomic measure: each atom deposited as an
/// h^-2-scaled load on the nearest interior node.
ScalarGridField dirac_loads(const AtomicMeasure& mu, const Domain& domain);

}  // namespace vortexlab
