#include "islab/linearized_system.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "islab/errors.hpp"
#include "islab/weighted_spaces.hpp"

namespace islab {

LinearCoefficients linear_coefficients_at(double r, double pi, const Vec4& u,
                                          const Vec4& dr, const Vec4& dpi,
                                          const Mat4& du, const ModelConstants& c) {
    if (r < kRMin || pi < kRMin)
        throw degeneracy_error("linear_coefficients_at: r or pi below working range");
    const double k = c.kappa;
    const double inv_k = 1.0 / k;
    const CoefficientValues cv = coefficients_at(r, pi, c);
    const double a0 = cv.a0, a2 = cv.a2;
    double divu = 0.0;
    for (int mu = 0; mu < 4; ++mu) divu += du[mu][mu];
    const Mat4 delta = projection_tensor(u);

    LinearCoefficients lc;
    lc.V1 = k * (2.0 * r + 1.0 + (1.0 - inv_k) * r * r * std::pow(a0, 2.0 + inv_k)) * divu;
    lc.Z1 = k * (2.0 + inv_k) * std::pow(a0, 1.0 + inv_k) * divu;

    // Pressure-gradient combination P_mu that recurs in V2, W2, Z2.
    Vec4 P{};
    for (int mu = 0; mu < 4; ++mu)
        P[mu] = (1.0 + inv_k) * dr[mu] +
                (2.0 + inv_k) * r * std::pow(a0, 1.0 + inv_k) * dpi[mu];

    const double v2_head = (inv_k * r * std::pow(a0, 2.0 + inv_k) - 1.0) * a2;
    for (int al = 0; al < 4; ++al) {
        double s = 0.0;
        for (int mu = 0; mu < 4; ++mu)
            s += (v2_head * P[mu] -
                  inv_k * (2.0 + inv_k) * std::pow(a0, 1.0 + inv_k) * dpi[mu]) *
                 delta[al][mu];
        lc.V2[al] = s * a2;
    }

    for (int al = 0; al < 4; ++al)
        for (int be = 0; be < 4; ++be) {
            double w = du[be][al] * metric_diag(be);  // d_mu u^alpha g^{mu beta}
            double updotp = 0.0;
            for (int mu = 0; mu < 4; ++mu) updotp += u[mu] * P[mu];
            w += a2 * ((al == be ? metric_diag(al) : 0.0) * updotp +
                       u[al] * metric_diag(be) * P[be]);
            lc.W2[al][be] = w;
        }

    for (int be = 0; be < 4; ++be) lc.W3_lower[be] = dpi[be];

    const double zeta = c.zeta_of_r(r);
    const double zeta_p = c.zeta_prime_of_r(r);
    const double lam_p = c.lambda_prime_of_r(r);
    lc.V3 = inv_k * std::pow(r, inv_k - 1.0) *
            (std::pow(pi, 3.0 + inv_k) * lam_p +
             zeta_p / std::pow(pi, 1.0 + inv_k) * divu);
    lc.Z3 = 1.0 + (3.0 + inv_k) * std::pow(pi, 2.0 + inv_k) * c.lambda_of_r(r) -
            (1.0 + inv_k) * zeta / std::pow(pi, 2.0 + inv_k) * divu;

    for (int al = 0; al < 4; ++al) {
        double s = 0.0;
        for (int mu = 0; mu < 4; ++mu)
            s += delta[al][mu] *
                 ((1.0 + inv_k) * r * a0 * a2 * dr[mu] +
                  (2.0 + inv_k) * r * r * std::pow(a0, 2.0 + inv_k) * a2 * dpi[mu] -
                  (1.0 + inv_k) * dpi[mu]);
        lc.Z2[al] = -(2.0 + inv_k) * std::pow(a0, inv_k) * a2 * s;
    }
    return lc;
}

LinearizedNodeRhs linearized_rhs_at(double rt, const Vec4& ut, double pit,
                                    const Vec4& drt, const Mat4& dut, const Vec4& dpit,
                                    double r, double pi, const Vec4& u,
                                    const Vec4& dr_bg, const CoefficientValues& cv,
                                    const LinearCoefficients& lc,
                                    const std::array<double, 6>& source6,
                                    const ModelConstants& c) {
    const double inv_k = 1.0 / c.kappa;
    double div_ut = 0.0;
    for (int mu = 0; mu < 4; ++mu) div_ut += dut[mu][mu];
    const Mat4 delta = projection_tensor(u);
    const Vec4 ut_lower = lower_index(ut);

    LinearizedNodeRhs out;
    double adv = 0.0;
    for (int mu = 0; mu < 4; ++mu) adv += dr_bg[mu] * ut[mu];
    out.dr_t = source6[0] - c.kappa * r * cv.a1 * div_ut - adv - lc.V1 * rt -
               r * r * lc.Z1 * pit;
    for (int al = 0; al < 4; ++al) {
        double grad = 0.0;
        for (int mu = 0; mu < 4; ++mu)
            grad += delta[al][mu] * ((1.0 + inv_k) * cv.a2 * drt[mu] +
                                     (2.0 + inv_k) * r * cv.a3 * dpit[mu]);
        double w2 = 0.0;
        for (int be = 0; be < 4; ++be) w2 += lc.W2[al][be] * ut_lower[be];
        out.du_t[al] =
            source6[1 + al] - grad - lc.V2[al] * rt - w2 - lc.Z2[al] * pit;
    }
    double w3 = 0.0;
    for (int al = 0; al < 4; ++al) w3 += lc.W3_lower[al] * ut[al];
    out.dpi_t = source6[5] - r * cv.a4 * div_ut - lc.V3 * rt - w3 - lc.Z3 * pit;
    return out;
}

Vec4 enforce_orthogonality(const Vec4& ut, const Vec4& u) {
    const double proj = minkowski_dot(u, ut);
    Vec4 out = ut;
    for (int al = 0; al < 4; ++al) out[al] += proj * u[al];
    return out;
}

LinearizedState enforce_orthogonality(const LinearizedState& ls,
                                      const std::vector<Vec4>& u_bg) {
    LinearizedState out = ls;
    for (std::size_t q = 0; q < ls.u_t.size(); ++q)
        out.u_t[q] = enforce_orthogonality(ls.u_t[q], u_bg[q]);
    return out;
}

SymmetrizerMultipliers symmetrizer_multipliers(const TransformedState& bg,
                                               const ModelConstants& c,
                                               const MovingGrid& g) {
    const double k = c.kappa;
    SymmetrizerMultipliers out;
    out.m_r.assign(g.n_cells, 0.0);
    out.m_u.assign(g.n_cells, 0.0);
    out.m_pi.assign(g.n_cells, 0.0);
    for (int q = 0; q < g.n_cells; ++q) {
        if (!g.interior_mask[q]) continue;
        const double r = bg.r[q], pi = bg.pi[q];
        const CoefficientValues cv = coefficients_at(r, pi, c);
        const double zeta = c.zeta_of_r(r);
        if (!(zeta > 0.0))
            throw degeneracy_error("symmetrizer_multipliers: zeta degenerate");
        out.m_r[q] = std::pow(r, 1.0 / k - 1.0);
        out.m_u[q] = k * k / (k + 1.0) * std::pow(r, 1.0 / k) * cv.a1 * cv.a1;
        out.m_pi[q] = (2.0 * k + 1.0) * k / (k + 1.0) * std::pow(r, 1.0 / k) * r *
                      std::pow(pi, 1.0 + 1.0 / k) * std::pow(cv.a0, 1.0 + 1.0 / k) *
                      cv.a1 / zeta;
    }
    return out;
}

IdentityResiduals energy_identity_residual_at(
    double r, double pi, const Vec4& dr, const Vec4& dpi, double rt, const Vec4& ut,
    double pit, const Vec4& drt, const Mat4& dut, const Vec4& dpit,
    double div_blue_flux, double div_pi_u, const ModelConstants& c) {
    const double k = c.kappa;
    const double inv_k = 1.0 / k;
    const double a0 = pi / r;
    const double a1 = r + 1.0 + r * r * std::pow(a0, 2.0 + inv_k);
    const double rk = std::pow(r, inv_k);

    double div_ut = 0.0, adv_r = 0.0, adv_rt = 0.0;
    for (int mu = 0; mu < 4; ++mu) {
        div_ut += dut[mu][mu];
        adv_r += dr[mu] * ut[mu];
        adv_rt += drt[mu] * ut[mu];
    }
    double remainder = 0.0;
    for (int mu = 0; mu < 4; ++mu)
        remainder += ((1.0 + k) * dr[mu] +
                      (2.0 * k + 1.0) * r * std::pow(a0, 1.0 + inv_k) * dpi[mu]) *
                     ut[mu];

    const double blue = k * rk * a1 * div_ut * rt + std::pow(r, inv_k - 1.0) * adv_r * rt +
                        k * rk * a1 * adv_rt - k * div_blue_flux + rk * remainder * rt;

    double adv_pit = 0.0;
    for (int mu = 0; mu < 4; ++mu) adv_pit += dpit[mu] * ut[mu];
    const double cpi = (2.0 * k + 1.0) * k / (k + 1.0);
    const double head = cpi * std::pow(r, 1.0 + inv_k) * std::pow(a0, 1.0 + inv_k) * a1;
    const double purple = head * (adv_pit + div_ut * pit - div_pi_u);

    return {std::abs(blue), std::abs(purple)};
}

// ---------------------------------------------------------------------------

TransformedState to_transformed_state(const FieldState& s) {
    TransformedState out;
    out.r = s.r;
    out.pi = s.pi;
    out.u.resize(s.r.size());
    for (std::size_t q = 0; q < s.r.size(); ++q)
        out.u[q] = normalize_velocity({s.u1[q], 0.0, 0.0});
    return out;
}

LinearizedState to_linearized_state(const PerturbationState& p, const FieldState& bg) {
    LinearizedState out;
    out.r_t = p.r_t;
    out.pi_t = p.pi_t;
    out.u_t.resize(p.r_t.size());
    for (std::size_t q = 0; q < p.r_t.size(); ++q) {
        const double u0 = std::sqrt(1.0 + bg.u1[q] * bg.u1[q]);
        out.u_t[q] = Vec4{bg.u1[q] * p.u1_t[q] / u0, p.u1_t[q], 0.0, 0.0};
    }
    return out;
}

namespace {

struct PerturbationStageDerivative {
    std::vector<double> dr_t, du1_t, dpi_t;
};

// Time derivative of the perturbation at fixed nodes, on the given background
// stage values. Uses the same A matrices as the nonlinear stepper with B
// replaced by the full linearized coupling.
PerturbationStageDerivative linearized_stage_derivative(
    const PerturbationState& p, const FieldState& bg, const MovingGrid& g, double t,
    const ModelConstants& c, const LinearizedRunOptions& opt) {
    const int n = g.n_cells;
    std::vector<double> u0(n), ut0(n);
    for (int q = 0; q < n; ++q) {
        u0[q] = std::sqrt(1.0 + bg.u1[q] * bg.u1[q]);
        ut0[q] = bg.u1[q] * p.u1_t[q] / u0[q];
    }
    const int acc = opt.fd_accuracy;
    const auto dr = fd_derivative(bg.r, 1, g, acc);
    const auto du0 = fd_derivative(u0, 1, g, acc);
    const auto du1 = fd_derivative(bg.u1, 1, g, acc);
    const auto dpi = fd_derivative(bg.pi, 1, g, acc);
    const auto drt = fd_derivative(p.r_t, 1, g, acc);
    const auto dut0 = fd_derivative(ut0, 1, g, acc);
    const auto dut1 = fd_derivative(p.u1_t, 1, g, acc);
    const auto dpit = fd_derivative(p.pi_t, 1, g, acc);

    PerturbationStageDerivative out;
    out.dr_t.resize(n);
    out.du1_t.resize(n);
    out.dpi_t.resize(n);
    for (int q = 0; q < n; ++q) {
        const Vec4 u{u0[q], bg.u1[q], 0.0, 0.0};
        const CharacteristicMatrices m = assemble_matrices(bg.r[q], bg.pi[q], u, c);

        // Background spacetime gradients (time parts recovered from the system).
        Vector6 bstate, bdx;
        bstate << bg.r[q], u0[q], bg.u1[q], 0.0, 0.0, bg.pi[q];
        bdx << dr[q], du0[q], du1[q], 0.0, 0.0, dpi[q];
        const Vector6 bdt =
            recover_time_derivatives(m, bstate, {bdx, Vector6::Zero(), Vector6::Zero()});
        const Vec4 dr_bg{bdt(0), dr[q], 0.0, 0.0};
        const Vec4 dpi_bg{bdt(5), dpi[q], 0.0, 0.0};
        Mat4 du_bg = zero_mat4();
        for (int al = 0; al < 4; ++al) {
            du_bg[0][al] = bdt(1 + al);
            du_bg[1][al] = (al == 0) ? du0[q] : (al == 1 ? du1[q] : 0.0);
        }

        LinearCoefficients lc;
        try {
            lc = linear_coefficients_at(bg.r[q], bg.pi[q], u, dr_bg, dpi_bg, du_bg, c);
        } catch (const degeneracy_error&) {
            // Edge cells sit below the working range; freeze the perturbation
            // coupling there (the fields are pinned by the boundary handling).
            out.dr_t[q] = 0.0;
            out.du1_t[q] = 0.0;
            out.dpi_t[q] = 0.0;
            continue;
        }

        // Coupling matrix C acting on (rt, ut^0..ut^3, pit).
        Matrix6 C = Matrix6::Zero();
        C(0, 0) = lc.V1;
        for (int be = 0; be < 4; ++be) C(0, 1 + be) = dr_bg[be];
        C(0, 5) = bg.r[q] * bg.r[q] * lc.Z1;
        for (int al = 0; al < 4; ++al) {
            C(1 + al, 0) = lc.V2[al];
            for (int be = 0; be < 4; ++be)
                C(1 + al, 1 + be) = lc.W2[al][be] * metric_diag(be);
            C(1 + al, 5) = lc.Z2[al];
        }
        C(5, 0) = lc.V3;
        for (int be = 0; be < 4; ++be) C(5, 1 + be) = lc.W3_lower[be];
        C(5, 5) = lc.Z3;

        Vector6 pstate, pdx, src;
        pstate << p.r_t[q], ut0[q], p.u1_t[q], 0.0, 0.0, p.pi_t[q];
        pdx << drt[q], dut0[q], dut1[q], 0.0, 0.0, dpit[q];
        src.setZero();
        if (opt.sources) {
            const auto sv = opt.sources(t, g.nodes[q]);
            src(0) = sv[0];
            src(2) = sv[1];
            src(1) = bg.u1[q] * sv[1] / u0[q];  // keep g orthogonal to u
            src(5) = sv[2];
        }
        const Vector6 rhs = src - m.Ai[0] * pdx - C * pstate;
        const Vector6 pdt = Eigen::PartialPivLU<Matrix6>(m.A0).solve(rhs);
        if (!pdt.allFinite())
            throw numerical_abort("linearized stage: singular A0 solve at node " +
                                  std::to_string(q));
        out.dr_t[q] = pdt(0);
        out.du1_t[q] = pdt(2);
        out.dpi_t[q] = pdt(5);
    }
    return out;
}

double source_base_norm(const LinearizedRunOptions& opt, const FieldState& bg,
                        const MovingGrid& g, double t, double kappa) {
    if (!opt.sources) return 0.0;
    LinearizedState src;
    const int n = g.n_cells;
    src.r_t.assign(n, 0.0);
    src.pi_t.assign(n, 0.0);
    src.u_t.assign(n, Vec4{0, 0, 0, 0});
    for (int q = 0; q < n; ++q) {
        const auto sv = opt.sources(t, g.nodes[q]);
        const double u0 = std::sqrt(1.0 + bg.u1[q] * bg.u1[q]);
        src.r_t[q] = sv[0];
        src.u_t[q] = Vec4{bg.u1[q] * sv[1] / u0, sv[1], 0.0, 0.0};
        src.pi_t[q] = sv[2];
    }
    std::vector<double> rbg = bg.r;
    return base_space_norm(src, rbg, kappa, g).total;
}

}  // namespace

LinearizedRun evolve_linearized(const PerturbationState& ls0, const FieldState& bg0,
                                const MovingGrid& grid, double T, double dt,
                                const ModelConstants& c,
                                const LinearizedRunOptions& opt) {
    LinearizedRun run;
    FieldState bg = bg0;
    PerturbationState p = ls0;
    MovingGrid g = grid;
    double t = 0.0;
    const int n = g.n_cells;

    auto record = [&](void) {
        run.times.push_back(t);
        run.grids.push_back(g);
        run.background.push_back(bg);
        run.perturbation.push_back(p);
        const TransformedState ts = to_transformed_state(bg);
        const LinearizedState ls = to_linearized_state(p, bg);
        run.energy.push_back(energy_functional(ls, ts, c, g));
        run.h_norm.push_back(base_space_norm(ls, ts.r, c.kappa, g).total);
        run.source_norm.push_back(source_base_norm(opt, bg, g, t, c.kappa));
        // W^{1,infty} bound of the background over the studied region: the
        // interior mask minus a buffer at the artificial far edge, where the
        // pinned Dirichlet values form a boundary layer that is not part of
        // the near-vacuum domain.
        const int far_buffer = std::max(4, n / 8);
        const auto dr = fd_derivative(bg.r, 1, g, opt.fd_accuracy);
        const auto du = fd_derivative(bg.u1, 1, g, opt.fd_accuracy);
        const auto dpi = fd_derivative(bg.pi, 1, g, opt.fd_accuracy);
        for (int q = 0; q < n - far_buffer; ++q) {
            if (!g.interior_mask[q]) continue;
            for (double v : {bg.r[q], bg.u1[q], bg.pi[q], dr[q], du[q], dpi[q]})
                run.K_measured = std::max(run.K_measured, std::abs(v));
        }
    };
    record();

    const int nsteps = static_cast<int>(std::llround(T / dt));
    for (int step = 0; step < nsteps; ++step) {
        // Shared-stage RK4 on (background, perturbation, boundary).
        auto bg_axpy = [n](const FieldState& base, const StageDerivative& d, double a) {
            FieldState out = base;
            for (int q = 0; q < n; ++q) {
                out.r[q] += a * d.dr[q];
                out.u1[q] += a * d.du1[q];
                out.pi[q] += a * d.dpi[q];
            }
            return out;
        };
        auto p_axpy = [n](const PerturbationState& base,
                          const PerturbationStageDerivative& d, double a) {
            PerturbationState out = base;
            for (int q = 0; q < n; ++q) {
                out.r_t[q] += a * d.dr_t[q];
                out.u1_t[q] += a * d.du1_t[q];
                out.pi_t[q] += a * d.dpi_t[q];
            }
            return out;
        };

        auto bg_stage = [&](const FieldState& state) {
            if (opt.evolve_background) return nonlinear_stage_derivative(state, g, c, opt.bg);
            StageDerivative zero;
            zero.dr.assign(n, 0.0);
            zero.du1.assign(n, 0.0);
            zero.dpi.assign(n, 0.0);
            return zero;
        };
        const StageDerivative b1 = bg_stage(bg);
        const auto p1 = linearized_stage_derivative(p, bg, g, t, c, opt);
        const FieldState bg2 = bg_axpy(bg, b1, 0.5 * dt);
        const StageDerivative b2 = bg_stage(bg2);
        const auto p2 = linearized_stage_derivative(p_axpy(p, p1, 0.5 * dt), bg2, g,
                                                    t + 0.5 * dt, c, opt);
        const FieldState bg3 = bg_axpy(bg, b2, 0.5 * dt);
        const StageDerivative b3 = bg_stage(bg3);
        const auto p3 = linearized_stage_derivative(p_axpy(p, p2, 0.5 * dt), bg3, g,
                                                    t + 0.5 * dt, c, opt);
        const FieldState bg4 = bg_axpy(bg, b3, dt);
        const StageDerivative b4 = bg_stage(bg4);
        const auto p4 =
            linearized_stage_derivative(p_axpy(p, p3, dt), bg4, g, t + dt, c, opt);

        const FieldState bg_pre = bg;
        for (int q = 0; q < n; ++q) {
            bg.r[q] += dt / 6.0 * (b1.dr[q] + 2 * b2.dr[q] + 2 * b3.dr[q] + b4.dr[q]);
            bg.u1[q] += dt / 6.0 * (b1.du1[q] + 2 * b2.du1[q] + 2 * b3.du1[q] + b4.du1[q]);
            bg.pi[q] += dt / 6.0 * (b1.dpi[q] + 2 * b2.dpi[q] + 2 * b3.dpi[q] + b4.dpi[q]);
            p.r_t[q] += dt / 6.0 * (p1.dr_t[q] + 2 * p2.dr_t[q] + 2 * p3.dr_t[q] + p4.dr_t[q]);
            p.u1_t[q] +=
                dt / 6.0 * (p1.du1_t[q] + 2 * p2.du1_t[q] + 2 * p3.du1_t[q] + p4.du1_t[q]);
            p.pi_t[q] +=
                dt / 6.0 * (p1.dpi_t[q] + 2 * p2.dpi_t[q] + 2 * p3.dpi_t[q] + p4.dpi_t[q]);
        }
        const double b_new =
            g.b + dt / 6.0 * (b1.db + 2 * b2.db + 2 * b3.db + b4.db);
        t += dt;

        if (opt.bg.move_boundary && b_new != g.b) {
            if (b_new >= g.x_far - 4.0 * g.h())
                throw domain_collapse_error("evolve_linearized: boundary reached far edge");
            const MovingGrid g_new = MovingGrid::uniform(b_new, g.x_far, n);
            bg.r = interp_to_nodes(bg.r, g, g_new);
            bg.u1 = interp_to_nodes(bg.u1, g, g_new);
            bg.pi = interp_to_nodes(bg.pi, g, g_new);
            p.r_t = interp_to_nodes(p.r_t, g, g_new);
            p.u1_t = interp_to_nodes(p.u1_t, g, g_new);
            p.pi_t = interp_to_nodes(p.pi_t, g, g_new);
            g = g_new;
        }
        for (int q = 0; q < 2; ++q) {
            bg.r[q] = std::max(bg.r[q], 0.0);
            bg.pi[q] = std::max(bg.pi[q], 0.0);
        }
        if (opt.bg.far_pin != FarPin::none) {
            for (int q = n - 2; q < n; ++q) {
                if (opt.bg.far_pin == FarPin::background && opt.bg.far_values) {
                    const auto v = opt.bg.far_values(t, g.nodes[q]);
                    bg.r[q] = v[0];
                    bg.u1[q] = v[1];
                    bg.pi[q] = v[2];
                } else {
                    bg.r[q] = bg_pre.r[q];
                    bg.u1[q] = bg_pre.u1[q];
                    bg.pi[q] = bg_pre.pi[q];
                }
                p.r_t[q] = 0.0;
                p.u1_t[q] = 0.0;
                p.pi_t[q] = 0.0;
            }
        }
        for (int q = 0; q < n; ++q) {
            if (std::isnan(p.r_t[q]) || std::isnan(p.u1_t[q]) || std::isnan(p.pi_t[q]) ||
                std::isnan(bg.r[q]))
                throw numerical_abort("evolve_linearized: NaN at t=" + std::to_string(t));
        }
        record();
    }
    return run;
}

EnergyExperimentReport energy_estimate_experiment(const PerturbationState& ls0,
                                                  const FieldState& bg0,
                                                  const MovingGrid& grid, double T,
                                                  double dt, const ModelConstants& c,
                                                  const LinearizedRunOptions& opt) {
    const LinearizedRun run = evolve_linearized(ls0, bg0, grid, T, dt, c, opt);
    EnergyExperimentReport rep;
    rep.times = run.times;
    rep.energy = run.energy;
    rep.h_norm = run.h_norm;
    rep.K_measured = run.K_measured;
    rep.source_int.assign(run.times.size(), 0.0);
    for (std::size_t i = 1; i < run.times.size(); ++i)
        rep.source_int[i] = rep.source_int[i - 1] +
                            0.5 * (run.source_norm[i] + run.source_norm[i - 1]) *
                                (run.times[i] - run.times[i - 1]);

    const double e0 = run.energy.front();
    double cfit = 0.0;
    bool any = false;
    for (std::size_t i = 1; i < run.times.size(); ++i) {
        if (run.times[i] < 0.05 * T) continue;  // skip the initial transient window
        if (e0 > 0.0 && run.energy[i] > 0.0) {
            cfit = std::max(cfit, std::log(run.energy[i] / e0) / run.times[i]);
            any = true;
        }
    }
    rep.fitted_C = any ? cfit : 0.0;
    rep.bound_holds = true;
    for (std::size_t i = 1; i < run.times.size(); ++i) {
        if (e0 > 0.0 &&
            run.energy[i] > std::exp(rep.fitted_C * run.times[i]) * e0 * (1.0 + 1e-9))
            rep.bound_holds = false;
    }
    double csrc = 0.0;
    for (std::size_t i = 1; i < run.times.size(); ++i) {
        if (rep.source_int[i] > 1e-14)
            csrc = std::max(csrc, std::sqrt(run.energy[i]) / rep.source_int[i]);
    }
    rep.source_constant = csrc;
    return rep;
}

}  // namespace islab
