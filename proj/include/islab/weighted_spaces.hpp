#pragma once

#include <span>
#include <vector>

#include "islab/fluid_model.hpp"
#include "islab/grid_domain.hpp"
#include "islab/state_types.hpp"

namespace islab {

// Weight convention, fixed once for the whole project: a weighted integral is
// stored as "exponent sigma of r multiplying |f|^2 is 2*sigma", i.e.
// ||f||^2_{H^{j,sigma}} = sum_{k<=j} int r^{2 sigma} |d^k f|^2 dx. The L^2(omega)
// spaces of the base space correspond to omega = r^{2 sigma}.
struct WeightedNormSpec {
    int j = 0;
    double sigma = 0.0;
};

// Throws spec_error when sigma <= -1/2.
double hjsigma_norm(std::span<const double> f, const WeightedNormSpec& spec,
                    std::span<const double> r, const MovingGrid& g, int accuracy = 4);

struct StateNormReport {
    double r_norm = 0.0;
    double u_norm = 0.0;
    double pi_norm = 0.0;
    double total = 0.0;
    WeightedNormSpec r_spec, u_spec, pi_spec;
};

// Base space H = L^2(r^{(1-kappa)/kappa}) x L^2(r^{1/kappa}) x L^2(r^{1/kappa});
// the 4-vector component sums |u~^alpha|^2 over all four slots.
StateNormReport base_space_norm(const LinearizedState& ls, std::span<const double> r_bg,
                                double kappa, const MovingGrid& g);

// High-order space H^{2l} = H^{2l, 1/(2k)+l-1/2} x H^{2l, 1/(2k)+l} x H^{2l, 1/(2k)+l}.
StateNormReport high_order_norm(const LinearizedState& ls, int l,
                                std::span<const double> r_bg, double kappa,
                                const MovingGrid& g, int accuracy = 4);

// E = 1/2 int r^{1/k-1} [ rt^2 + k^2/(k+1) r a1^2 ut_a ut^a
//       + (2k+1)k/(k+1) r * (r pi^{1+1/k} a0^{1+1/k} a1 / zeta(r^{1/k})) pt^2 ] dx,
// integrated over the interior mask. ut_a ut^a uses the Minkowski metric; it is
// nonnegative when ut is orthogonal to the background velocity.
double energy_functional(const LinearizedState& ls, const TransformedState& bg,
                         const ModelConstants& c, const MovingGrid& g);

// || f ||_{lo} / || f ||_{hi} for a ladder pair with j_hi - j_lo = sigma_hi - sigma_lo,
// sigma_hi > sigma_lo > -1/2 (Hardy-type embedding direction).
double embedding_ratio(std::span<const double> f, const WeightedNormSpec& spec_hi,
                       const WeightedNormSpec& spec_lo, std::span<const double> r,
                       const MovingGrid& g, int accuracy = 4);

struct EquivalenceBracket {
    double c_low = 0.0;
    double c_high = 0.0;
};

// Empirical min/max of E / ||.||_H^2 over an ensemble; zero states are skipped.
EquivalenceBracket energy_equivalence_check(std::span<const LinearizedState> ensemble,
                                            const TransformedState& bg,
                                            const ModelConstants& c, const MovingGrid& g);

}  // namespace islab
