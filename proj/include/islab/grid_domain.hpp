#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "islab/minkowski.hpp"

namespace islab {

// Uniform cell-centered grid on [b, x_far]. Cell centers keep r = 0 off the
// quadrature points; the two cells nearest each edge are excluded from the
// interior mask.
struct MovingGrid {
    double b = 0.0;
    double x_far = 1.0;
    int n_cells = 0;
    std::vector<double> nodes;
    std::vector<std::uint8_t> interior_mask;

    double h() const { return (x_far - b) / n_cells; }

    static MovingGrid uniform(double b, double x_far, int n_cells);
};

// Finite-difference weights for the m-th derivative at z from samples at xs
// (Fornberg recursion); m = 0 gives interpolation weights.
std::vector<double> fd_weights(double z, std::span<const double> xs, int m);

// Stencil width is order + accuracy (centered where possible, shifted at the
// edges), exact on polynomials of degree <= order + accuracy - 1.
std::vector<double> fd_derivative(std::span<const double> f, int order,
                                  const MovingGrid& g, int accuracy = 4);

// Same stencils on a raw uniform axis (used by the 3D operators).
std::vector<double> fd_derivative_axis(std::span<const double> f, int order, double h,
                                       int accuracy = 4);

// Midpoint rule for int r^{2 sigma} |f|^2 dx over [b, x_far].
double weighted_quadrature(std::span<const double> f, std::span<const double> r,
                           double sigma, const MovingGrid& g);

// Plain midpoint integral of a node field.
double integrate(std::span<const double> f, const MovingGrid& g);

// One forward-Euler increment of the tracked edge; regenerates the grid with
// the same n_cells on [b + dt v, x_far].
MovingGrid advance_boundary(const MovingGrid& g, double edge_velocity, double dt);

// Classical RK4 on b' = v(t, b).
double advance_boundary_rk4(double b, double t, double dt,
                            const std::function<double(double, double)>& v);

// Degree-4 Lagrange interpolation of node values onto new node positions;
// one-sided (extrapolating) windows at the edges.
std::vector<double> interp_to_nodes(std::span<const double> f, const MovingGrid& from,
                                    const MovingGrid& to);

struct FlowMapSample {
    double tau;     // proper time
    double tcoord;  // coordinate time component of eta
    double x;       // spatial component of eta
};

struct Trajectory {
    std::vector<FlowMapSample> samples;
    bool exited = false;
};

struct FlowMapState {
    std::vector<Trajectory> trajectories;
    int tracer_count = 0;
};

// Solves d eta / d tau = u o eta, eta(0, y) = (0, y) by RK4; u is the
// 4-velocity as a function of (t, x). Trajectories leaving [b, x_far] are
// marked exited and frozen.
FlowMapState integrate_flow_map(const std::function<Vec4(double, double)>& u,
                                std::span<const double> seeds, double T, double dt,
                                double b, double x_far);

// Discrete residual of the moving-domain differentiation formula
//   d/dt int_{Omega_t} f dx = int (1/u^0) D_t f dx + int f d_i(u^i/u^0) dx
// (with the integrand of the second term carrying the factor f). Both edges of
// the test domain are advected with the fluid velocity. f and u are analytic
// callables of (t, x); the residual is O(dt^2 + h^2).
double transport_theorem_residual(const std::function<double(double, double)>& f,
                                  const std::function<Vec4(double, double)>& u,
                                  double t, double dt, double b, double x_far,
                                  int n_cells);

}  // namespace islab
