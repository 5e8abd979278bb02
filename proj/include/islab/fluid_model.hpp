#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "islab/minkowski.hpp"
#include "islab/state_types.hpp"

namespace islab {

// Coefficient evaluation refuses nodes with r or pi below this; the boundary
// node itself is handled by the grid's interior mask.
inline constexpr double kRMin = 1e-10;

struct ModelConstants {
    double kappa = 1.0;
    double tau_pi = 1.0 / 3.0;  // bulk relaxation time, default 1/(2 + 1/kappa)
    std::function<double(double)> lambda_fn;
    std::function<double(double)> lambda_prime_fn;
    std::function<double(double)> zeta_fn;
    std::function<double(double)> zeta_prime_fn;
    int dim = 1;

    // zeta(rho) = rho^{2 kappa + 1} exactly, lambda(rho) = lambda0 / (1 + rho).
    static ModelConstants defaults(double kappa, double lambda0 = 1.0, int dim = 1);

    double pressure(double rho) const;        // p = rho^{kappa+1}
    double dp_drho(double rho) const;         // (kappa+1) rho^kappa
    double zeta_of_r(double r) const;         // zeta(r^{1/kappa})
    double zeta_prime_of_r(double r) const;   // zeta'(r^{1/kappa})
    double lambda_of_r(double r) const;
    double lambda_prime_of_r(double r) const;
};

// Samples zeta(rho)/rho^{2 kappa + 1} and a centered difference of lambda over
// [rho_lo, rho_hi]; throws domain_error if the bounds in the model assumptions
// fail on that range.
void check_transport_bounds(const ModelConstants& c, double rho_lo, double rho_hi,
                            int samples = 64);

// u^0 = sqrt(1 + |u_spatial|^2), so u.u = -1 exactly in exact arithmetic.
Vec4 normalize_velocity(const std::array<double, 3>& spatial);
std::vector<Vec4> normalize_velocity(std::span<const std::array<double, 3>> spatial);

// Delta^{alpha beta} = g^{alpha beta} + u^alpha u^beta. Rejects u with
// normalization residual above 1e-8.
Mat4 projection_tensor(const Vec4& u);

// T_{mu nu} = rho u_mu u_nu + (p + Pi) Delta_{mu nu} with p = rho^{kappa+1}.
Mat4 stress_energy(double rho, const Vec4& u, double Pi, const ModelConstants& c);

TransformedState transform(const PrimitiveState& s, const ModelConstants& c);
PrimitiveState inverse_transform(const TransformedState& s, const ModelConstants& c);

struct CoefficientValues {
    double a0, a1, a2, a3, a4;
};

// a0 = pi/r, a1 = r + 1 + r^2 a0^{2+1/kappa}, a2 = 1/a1, a3 = a0^{1+1/kappa} a2,
// a4 = zeta(r^{1/kappa}) / (r pi^{1+1/kappa}). Throws degeneracy_error below kRMin.
CoefficientValues coefficients_at(double r, double pi, const ModelConstants& c);

// Field version; evaluates only where mask (if given) is true, writing zeros
// elsewhere.
CoefficientSet coefficients(const TransformedState& s, const ModelConstants& c,
                            const std::vector<std::uint8_t>* mask = nullptr);

// margin = [1 - dp/drho] - [zeta/tau_Pi] / (rho + p + Pi); causal iff >= 0.
// The n (dp/dn)_rho term vanishes for the barotropic equation of state.
double causality_margin(double rho, double Pi, const ModelConstants& c);

// a^alpha in the transformed variables:
//   a^alpha = -[(1+1/k) r^{1/k} d_mu r + (2+1/k) pi^{1+1/k} d_mu pi] Delta^{alpha mu}
//             / (r^{1+1/k} + r^{1/k} + pi^{2+1/k}),
// which is the printed primitive-variable formula rewritten with r = rho^kappa,
// pi = Pi^{kappa/(2kappa+1)}. grad_r/grad_pi are d_mu (lower index).
Vec4 four_acceleration(double r, double pi, const Vec4& u, const Vec4& grad_r,
                       const Vec4& grad_pi, const ModelConstants& c);

enum class BoundaryClass { bounded_nonzero, zero, unbounded };

// Decay rates rho ~ d^sigma, Pi ~ d^eta; classification of the front
// acceleration d^{sigma kappa - 1} + d^{eta - sigma - 1} (infinite when
// sigma > eta). Equalities are read with tolerance 1e-9.
BoundaryClass classify_boundary(double sigma, double eta, double kappa);

const char* to_string(BoundaryClass c);

struct DecayFit {
    double exponent;
    double residual;  // rms residual of the log-log least squares fit
};

// Least-squares slope of log(field) against log(d); needs >= 8 positive samples.
DecayFit fit_decay_exponent(std::span<const double> field, std::span<const double> d);

}  // namespace islab
