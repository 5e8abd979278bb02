#include "islab/weighted_spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "islab/errors.hpp"

namespace islab {

namespace {

void check_sigma(double sigma) {
    if (!(sigma > -0.5))
        throw spec_error("weight exponent sigma must exceed -1/2, got " +
                         std::to_string(sigma));
}

double component_l2sq(std::span<const double> f, std::span<const double> r, double sigma,
                      const MovingGrid& g) {
    return weighted_quadrature(f, r, sigma, g);
}

}  // namespace

double hjsigma_norm(std::span<const double> f, const WeightedNormSpec& spec,
                    std::span<const double> r, const MovingGrid& g, int accuracy) {
    check_sigma(spec.sigma);
    if (spec.j < 0) throw spec_error("derivative count j must be nonnegative");
    double acc = component_l2sq(f, r, spec.sigma, g);
    std::vector<double> buf;
    for (int k = 1; k <= spec.j; ++k) {
        buf = fd_derivative(f, k, g, accuracy);
        acc += component_l2sq(buf, r, spec.sigma, g);
    }
    return std::sqrt(acc);
}

StateNormReport base_space_norm(const LinearizedState& ls, std::span<const double> r_bg,
                                double kappa, const MovingGrid& g) {
    StateNormReport rep;
    rep.r_spec = {0, (1.0 - kappa) / (2.0 * kappa)};
    rep.u_spec = {0, 1.0 / (2.0 * kappa)};
    rep.pi_spec = {0, 1.0 / (2.0 * kappa)};
    rep.r_norm = std::sqrt(component_l2sq(ls.r_t, r_bg, rep.r_spec.sigma, g));
    double usq = 0.0;
    std::vector<double> comp(g.n_cells);
    for (int a = 0; a < 4; ++a) {
        for (int q = 0; q < g.n_cells; ++q) comp[q] = ls.u_t[q][a];
        usq += component_l2sq(comp, r_bg, rep.u_spec.sigma, g);
    }
    rep.u_norm = std::sqrt(usq);
    rep.pi_norm = std::sqrt(component_l2sq(ls.pi_t, r_bg, rep.pi_spec.sigma, g));
    rep.total = std::sqrt(rep.r_norm * rep.r_norm + rep.u_norm * rep.u_norm +
                          rep.pi_norm * rep.pi_norm);
    return rep;
}

StateNormReport high_order_norm(const LinearizedState& ls, int l,
                                std::span<const double> r_bg, double kappa,
                                const MovingGrid& g, int accuracy) {
    if (l < 0) throw spec_error("high_order_norm: l must be nonnegative");
    StateNormReport rep;
    rep.r_spec = {2 * l, 1.0 / (2.0 * kappa) + l - 0.5};
    rep.u_spec = {2 * l, 1.0 / (2.0 * kappa) + l};
    rep.pi_spec = {2 * l, 1.0 / (2.0 * kappa) + l};
    rep.r_norm = hjsigma_norm(ls.r_t, rep.r_spec, r_bg, g, accuracy);
    double usq = 0.0;
    std::vector<double> comp(g.n_cells);
    for (int a = 0; a < 4; ++a) {
        for (int q = 0; q < g.n_cells; ++q) comp[q] = ls.u_t[q][a];
        const double nrm = hjsigma_norm(comp, rep.u_spec, r_bg, g, accuracy);
        usq += nrm * nrm;
    }
    rep.u_norm = std::sqrt(usq);
    rep.pi_norm = hjsigma_norm(ls.pi_t, rep.pi_spec, r_bg, g, accuracy);
    rep.total = std::sqrt(rep.r_norm * rep.r_norm + rep.u_norm * rep.u_norm +
                          rep.pi_norm * rep.pi_norm);
    return rep;
}

double energy_functional(const LinearizedState& ls, const TransformedState& bg,
                         const ModelConstants& c, const MovingGrid& g) {
    const double k = c.kappa;
    const double cu = k * k / (k + 1.0);
    const double cp = (2.0 * k + 1.0) * k / (k + 1.0);
    const double h = g.h();
    double acc = 0.0;
    for (int q = 0; q < g.n_cells; ++q) {
        if (!g.interior_mask[q]) continue;
        const double r = bg.r[q];
        const double pi = bg.pi[q];
        const CoefficientValues cv = coefficients_at(r, pi, c);
        const double zeta = c.zeta_of_r(r);
        if (!(zeta > 0.0))
            throw degeneracy_error("energy_functional: zeta vanishes on interior");
        const double w = std::pow(r, 1.0 / k - 1.0);
        const double uu = minkowski_dot(ls.u_t[q], ls.u_t[q]);
        const double pi_weight =
            r * std::pow(pi, 1.0 + 1.0 / k) * std::pow(cv.a0, 1.0 + 1.0 / k) * cv.a1 / zeta;
        acc += h * w *
               (ls.r_t[q] * ls.r_t[q] + cu * r * cv.a1 * cv.a1 * uu +
                cp * r * pi_weight * ls.pi_t[q] * ls.pi_t[q]);
    }
    return 0.5 * acc;
}

double embedding_ratio(std::span<const double> f, const WeightedNormSpec& spec_hi,
                       const WeightedNormSpec& spec_lo, std::span<const double> r,
                       const MovingGrid& g, int accuracy) {
    check_sigma(spec_lo.sigma);
    check_sigma(spec_hi.sigma);
    if (!(spec_hi.j > spec_lo.j) || spec_lo.j < 0)
        throw spec_error("embedding_ratio: need j_hi > j_lo >= 0");
    if (!(spec_hi.sigma > spec_lo.sigma))
        throw spec_error("embedding_ratio: need sigma_hi > sigma_lo");
    const double ladder =
        (spec_hi.j - spec_lo.j) - (spec_hi.sigma - spec_lo.sigma);
    if (std::abs(ladder) > 1e-12)
        throw spec_error("embedding_ratio: ladder relation j1-j2 = sigma1-sigma2 violated");
    const double hi = hjsigma_norm(f, spec_hi, r, g, accuracy);
    const double lo = hjsigma_norm(f, spec_lo, r, g, accuracy);
    if (hi == 0.0) throw domain_error("embedding_ratio: zero field");
    return lo / hi;
}

EquivalenceBracket energy_equivalence_check(std::span<const LinearizedState> ensemble,
                                            const TransformedState& bg,
                                            const ModelConstants& c, const MovingGrid& g) {
    EquivalenceBracket bracket;
    bracket.c_low = std::numeric_limits<double>::infinity();
    bracket.c_high = 0.0;
    // Restrict the H-norm to the interior mask so both quadratic forms live on
    // the same node set as the energy.
    for (const LinearizedState& ls : ensemble) {
        LinearizedState masked = ls;
        for (int q = 0; q < g.n_cells; ++q) {
            if (!g.interior_mask[q]) {
                masked.r_t[q] = 0.0;
                masked.u_t[q] = Vec4{0, 0, 0, 0};
                masked.pi_t[q] = 0.0;
            }
        }
        const StateNormReport rep = base_space_norm(masked, bg.r, c.kappa, g);
        const double h2 = rep.total * rep.total;
        if (h2 < 1e-28) continue;
        const double ratio = energy_functional(masked, bg, c, g) / h2;
        bracket.c_low = std::min(bracket.c_low, ratio);
        bracket.c_high = std::max(bracket.c_high, ratio);
    }
    return bracket;
}

}  // namespace islab
