#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "islab/fluid_model.hpp"
#include "islab/grid_domain.hpp"
#include "islab/state_types.hpp"

namespace islab {

using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Vector6 = Eigen::Matrix<double, 6, 1>;

// Material-derivative right-hand sides of the transformed system.
struct NonlinearRHS {
    std::vector<double> dr;
    std::vector<Vec4> du;
    std::vector<double> dpi;
};

// Full spacetime gradients of the state; index order [node][mu] and
// [node][mu][alpha] with d_mu u^alpha.
struct SpacetimeGradients {
    std::vector<Vec4> dr;
    std::vector<Vec4> dpi;
    std::vector<Mat4> du;
};

// Coefficients with the degenerate-node limits built in: near r = pi = 0 the
// ratio a0 = pi/r is taken from the floored quotient and a4 is evaluated in
// the factored form zeta_ratio * a0^{-(1+1/kappa)} so nothing blows up where
// every use is multiplied by r.
CoefficientValues coefficients_guarded(double r, double pi, const ModelConstants& c);

// D_t r = -k r a1 div u;  D_t u^a = -(1+1/k) a2 Delta^{a mu} d_mu r
//   - (2+1/k) r a3 Delta^{a mu} d_mu pi;  D_t pi = -pi - lambda pi^{3+1/k} - r a4 div u.
NonlinearRHS nonlinear_rhs(const TransformedState& ts, const CoefficientSet& coeffs,
                           const SpacetimeGradients& grads, const ModelConstants& c);

// Quasilinear form A^0 dt q + A^i di q + B q = 0 for q = (r, u^0..u^3, pi).
struct CharacteristicMatrices {
    Matrix6 A0;
    std::array<Matrix6, 3> Ai;
    Matrix6 B;
};

CharacteristicMatrices assemble_matrices(double r, double pi, const Vec4& u,
                                         const ModelConstants& c);

// dt q = -(A^0)^{-1} [ A^i di q + B q ].
Vector6 recover_time_derivatives(const CharacteristicMatrices& m, const Vector6& state,
                                 const std::array<Vector6, 3>& spatial_grads);

// 1D evolution state: spatial velocity u1 is evolved, u0 recomputed by
// normalization each stage.
struct FieldState {
    std::vector<double> r;
    std::vector<double> u1;
    std::vector<double> pi;
};

enum class FarPin { none, initial, background };

struct EvolutionOptions {
    double cfl = 0.4;
    int fd_accuracy = 4;
    FarPin far_pin = FarPin::initial;
    // Supplies (r, u1, pi) at (t, x) for FarPin::background.
    std::function<std::array<double, 3>(double, double)> far_values;
    bool move_boundary = true;
};

double cfl_dt(const MovingGrid& g, double cfl = 0.4);

// Eulerian time derivative of every evolved field plus the edge speed, used by
// both the nonlinear stepper and the shared-stage linearized stepper.
struct StageDerivative {
    std::vector<double> dr;
    std::vector<double> du1;
    std::vector<double> dpi;
    double db = 0.0;
};

StageDerivative nonlinear_stage_derivative(const FieldState& s, const MovingGrid& g,
                                           const ModelConstants& c,
                                           const EvolutionOptions& opt);

// Classical RK4 step; advances the tracked boundary alongside the fields and
// remaps onto the new grid with degree-4 interpolation. Aborts on NaN.
void rk4_step(FieldState& s, MovingGrid& g, double& t, double dt,
              const ModelConstants& c, const EvolutionOptions& opt);

struct NonlinearRun {
    std::vector<double> times;
    std::vector<MovingGrid> grids;
    std::vector<FieldState> states;
};

NonlinearRun evolve_nonlinear(const FieldState& initial, const MovingGrid& grid,
                              double T, double dt, const ModelConstants& c,
                              const EvolutionOptions& opt);

// Corrected evolution laws for a0 = pi/r, 1/a0, and zeta(r^{1/k})/r^{2+1/k}
// along the flow (exact chain rule of the transformed system; see the tests
// for the product-rule and one-step consistency checks).
struct CoefficientOdeRhs {
    double dt_a0;
    double dt_inv_a0;
    double dt_zeta_ratio;
};

CoefficientOdeRhs coefficient_ode_rhs(double r, double pi, double divu,
                                      const ModelConstants& c);

// Residual of each equation for a prescribed candidate background (r, u1, pi)
// as callables of (t, x); time derivatives by centered differences with dt_fd.
struct ResidualFields {
    std::vector<double> r_eq;
    std::vector<double> u_eq;  // spatial component
    std::vector<double> pi_eq;
};

ResidualFields manufactured_residual(
    const std::function<double(double, double)>& r_fn,
    const std::function<double(double, double)>& u1_fn,
    const std::function<double(double, double)>& pi_fn, double t, const MovingGrid& g,
    const ModelConstants& c, double dt_fd = 1e-6);

}  // namespace islab
