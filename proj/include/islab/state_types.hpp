#pragma once

#include <vector>

#include "islab/minkowski.hpp"

namespace islab {

// Grid samples of (rho, u, Pi) on the current moving domain. u holds upper
// components and is expected to satisfy u.u = -1 at every node.
struct PrimitiveState {
    std::vector<double> rho;
    std::vector<Vec4> u;
    std::vector<double> Pi;
};

// Same fluid in the degeneracy-adapted variables r = rho^kappa,
// pi = Pi^{kappa/(2 kappa + 1)}; both vanish linearly at the vacuum edge.
struct TransformedState {
    std::vector<double> r;
    std::vector<Vec4> u;
    std::vector<double> pi;
};

// The five coefficient fields of the transformed nonlinear system.
struct CoefficientSet {
    std::vector<double> a0, a1, a2, a3, a4;
};

// Perturbation fields riding on a background TransformedState (passed
// separately wherever it is needed). u_t holds upper components.
struct LinearizedState {
    std::vector<double> r_t;
    std::vector<Vec4> u_t;
    std::vector<double> pi_t;
};

}  // namespace islab
