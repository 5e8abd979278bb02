#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <functional>
#include <string>
#include <vector>

#include "islab/grid_domain.hpp"
#include "islab/minkowski.hpp"

namespace islab {

using ScalarField1D = std::vector<double>;
using SpMat = Eigen::SparseMatrix<double>;

// Analytic background for operator assembly and application; r must be
// positive on the open domain and may vanish at the vacuum edge.
struct EllipticBackground1D {
    std::function<double(double)> r;
    std::function<double(double)> u1;  // spatial velocity; H = 1 - (u1/u0)^2
};

double frame_H_1d(double u1);

// Printed operators, evaluated pointwise with FD stencils of the given
// accuracy. The vector sector works on the spatial component; the full
// covector is v_alpha = A_alpha^1 * core in 1D.
ScalarField1D apply_L1_tilde_1d(const ScalarField1D& rt, const EllipticBackground1D& bg,
                                const MovingGrid& g, double kappa, int accuracy = 4);
ScalarField1D apply_L1_hat_1d(const ScalarField1D& rt, const EllipticBackground1D& bg,
                              const MovingGrid& g, double kappa, int accuracy = 4);
ScalarField1D apply_L2_tilde_1d(const ScalarField1D& ut, const EllipticBackground1D& bg,
                                const MovingGrid& g, double kappa, int accuracy = 4);
ScalarField1D apply_L2_hat_1d(const ScalarField1D& ut, const EllipticBackground1D& bg,
                              const MovingGrid& g, double kappa, int accuracy = 4);
// L3 has no antisymmetric sector in one dimension.
ScalarField1D apply_L3_tilde_1d(const ScalarField1D& ut, const MovingGrid& g);

// ---------------------------------------------------------------------------
// Discrete operators. The assembled matrix represents the NON-NEGATIVE
// operator of the self-adjointness lemmas, i.e. the Dirichlet form of -Lhat:
//   <M f, g>_w = (kappa+1) int r^{1/k} H df dg   (scalar sector)
// in the weighted inner product <f,g>_w = f^T N g. S is the stiffness (flux
// form, symmetric PSD by construction), N the mass. The operator action is
// N^{-1} S; for block masses the inverse blocks are prefactored.
// ---------------------------------------------------------------------------
struct DiscreteOperator {
    SpMat S;
    SpMat N;      // symmetric positive definite mass (diagonal or 3x3 blocks)
    SpMat Ninv;   // exact inverse of N (same sparsity)
    double sigma; // exponent of r in the inner-product weight (2 sigma convention)
    int block = 1;
    std::string boundary_handling;

    Eigen::VectorXd apply(const Eigen::VectorXd& f) const { return Ninv * (S * f); }
    double inner(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const {
        return f.dot(N * g);
    }
    int size() const { return static_cast<int>(S.rows()); }
};

DiscreteOperator assemble_l1hat_1d(const EllipticBackground1D& bg, const MovingGrid& g,
                                   double kappa);
DiscreteOperator assemble_l23hat_1d(const EllipticBackground1D& bg, const MovingGrid& g,
                                    double kappa);

// Uniform cell-centered box grid, nodes at origin + (i+1/2) h per axis.
struct Grid3D {
    int n = 8;
    double h = 0.125;
    std::array<double, 3> origin{0.0, 0.0, 0.0};

    int size() const { return n * n * n; }
    int idx(int i, int j, int k) const { return (k * n + j) * n + i; }
    std::array<double, 3> node(int i, int j, int k) const {
        return {origin[0] + (i + 0.5) * h, origin[1] + (j + 0.5) * h,
                origin[2] + (k + 0.5) * h};
    }
};

struct EllipticBackground3D {
    std::function<double(std::array<double, 3>)> r;
    std::function<std::array<double, 3>(std::array<double, 3>)> u;  // spatial velocity
};

// Component-major vector fields: v[comp * N + node].
using VectorField3D = std::vector<double>;

std::vector<double> apply_L1_tilde_3d(const std::vector<double>& rt,
                                      const EllipticBackground3D& bg, const Grid3D& g,
                                      double kappa, int accuracy = 4);
VectorField3D apply_L2_tilde_3d(const VectorField3D& v, const EllipticBackground3D& bg,
                                const Grid3D& g, double kappa, int accuracy = 4);
// Weighted divergence of the H-conjugated curl; annihilates gradients.
VectorField3D apply_L3_tilde_3d(const VectorField3D& v, const EllipticBackground3D& bg,
                                const Grid3D& g, double kappa, int accuracy = 4);

DiscreteOperator assemble_l1hat_3d(const EllipticBackground3D& bg, const Grid3D& g,
                                   double kappa);
DiscreteOperator assemble_l23hat_3d(const EllipticBackground3D& bg, const Grid3D& g,
                                    double kappa);

// max_node |L3(grad phi)| for a scalar phi sampled on the grid; the gradient
// is taken analytically by the caller and passed as a vector field.
double curl_annihilation_residual(const VectorField3D& grad_phi,
                                  const EllipticBackground3D& bg, const Grid3D& g,
                                  double kappa, int accuracy = 4);

// (op + I) x = rhs via conjugate gradients on (S + N) x = N rhs with Jacobi
// preconditioning; throws convergence_error with the residual on cap.
Eigen::VectorXd solve_shifted(const DiscreteOperator& op, const Eigen::VectorXd& rhs,
                              double tol = 1e-12, int max_iters = 50000,
                              int* iters_out = nullptr);

struct SpectrumReport {
    double min_eig = 0.0;      // exact (dense) or certified lower bound (sparse)
    double max_eig = 0.0;      // exact (dense) or Rayleigh estimate (sparse)
    double sym_defect = 0.0;   // ||S - S^T||_inf / ||S||_inf
    double op_norm = 0.0;      // ||N^{-1} S||_inf
    bool psd_certified = false;
    std::string method;
};

// Dense generalized eigenvalues of (S, N); n <= 2000 recommended.
SpectrumReport spectrum_dense(const DiscreteOperator& op);

// Sparse path: symmetry defect, LDLT positivity certificate of S + delta N,
// and a Rayleigh probe of the extreme eigenvalues.
SpectrumReport spectrum_sparse(const DiscreteOperator& op, double delta_rel = 1e-8,
                               std::uint64_t probe_seed = 7);

}  // namespace islab
