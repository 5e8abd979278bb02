#include "islab/nonlinear_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "islab/errors.hpp"

namespace islab {

CoefficientValues coefficients_guarded(double r, double pi, const ModelConstants& c) {
    if (r >= kRMin && pi >= kRMin) return coefficients_at(r, pi, c);
    CoefficientValues v;
    const double inv_k = 1.0 / c.kappa;
    const double rf = std::max(r, 1e-300);
    v.a0 = std::clamp(std::max(pi, 0.0) / rf, 0.0, 1e6);
    v.a1 = std::max(r, 0.0) + 1.0 + r * r * std::pow(v.a0, 2.0 + inv_k);
    v.a2 = 1.0 / v.a1;
    v.a3 = std::pow(v.a0, 1.0 + inv_k) * v.a2;
    // a4 = [zeta(rho)/rho^{2k+1}] * (r/pi)^{1+1/k}; the bracket is the bounded
    // transport ratio, the quotient is 1/a0^{1+1/k}.
    const double rho = std::pow(std::max(r, kRMin), inv_k);
    const double ratio = c.zeta_fn(rho) / std::pow(rho, 2.0 * c.kappa + 1.0);
    v.a4 = (v.a0 > 0.0) ? ratio * std::pow(v.a0, -(1.0 + inv_k)) : 0.0;
    return v;
}

NonlinearRHS nonlinear_rhs(const TransformedState& ts, const CoefficientSet& coeffs,
                           const SpacetimeGradients& grads, const ModelConstants& c) {
    const std::size_t n = ts.r.size();
    NonlinearRHS out;
    out.dr.resize(n);
    out.du.resize(n);
    out.dpi.resize(n);
    const double inv_k = 1.0 / c.kappa;
    for (std::size_t q = 0; q < n; ++q) {
        const double r = ts.r[q];
        const double pi = ts.pi[q];
        double divu = 0.0;
        for (int mu = 0; mu < 4; ++mu) divu += grads.du[q][mu][mu];
        out.dr[q] = -c.kappa * r * coeffs.a1[q] * divu;
        const Mat4 delta = projection_tensor(ts.u[q]);
        for (int al = 0; al < 4; ++al) {
            double s = 0.0;
            for (int mu = 0; mu < 4; ++mu)
                s += delta[al][mu] * ((1.0 + inv_k) * coeffs.a2[q] * grads.dr[q][mu] +
                                      (2.0 + inv_k) * r * coeffs.a3[q] * grads.dpi[q][mu]);
            out.du[q][al] = -s;
        }
        out.dpi[q] = -pi - c.lambda_of_r(r) * std::pow(pi, 3.0 + inv_k) -
                     r * coeffs.a4[q] * divu;
    }
    return out;
}

CharacteristicMatrices assemble_matrices(double r, double pi, const Vec4& u,
                                         const ModelConstants& c) {
    const CoefficientValues cv = coefficients_guarded(r, pi, c);
    const double inv_k = 1.0 / c.kappa;
    const Mat4 delta = projection_tensor(u);
    CharacteristicMatrices m;
    m.A0.setZero();
    m.B.setZero();
    for (auto& a : m.Ai) a.setZero();

    const double c_r = (1.0 + inv_k) * cv.a2;        // multiplies Delta^{alpha mu} d_mu r
    const double c_p = (2.0 + inv_k) * r * cv.a3;    // multiplies Delta^{alpha mu} d_mu pi

    // mu = 0 block.
    m.A0(0, 0) = u[0];
    m.A0(0, 1) = c.kappa * r * cv.a1;
    for (int al = 0; al < 4; ++al) {
        m.A0(1 + al, 0) = c_r * delta[al][0];
        m.A0(1 + al, 1 + al) = u[0];
        m.A0(1 + al, 5) = c_p * delta[al][0];
    }
    m.A0(5, 1) = r * cv.a4;
    m.A0(5, 5) = u[0];

    // Spatial blocks, i = 1..3.
    for (int i = 1; i <= 3; ++i) {
        Matrix6& a = m.Ai[i - 1];
        a(0, 0) = u[i];
        a(0, 1 + i) = c.kappa * r * cv.a1;
        for (int al = 0; al < 4; ++al) {
            a(1 + al, 0) = c_r * delta[al][i];
            a(1 + al, 1 + al) = u[i];
            a(1 + al, 5) = c_p * delta[al][i];
        }
        a(5, 1 + i) = r * cv.a4;
        a(5, 5) = u[i];
    }

    m.B(5, 5) = 1.0 + c.lambda_of_r(r) * std::pow(pi, 2.0 + inv_k);
    return m;
}

Vector6 recover_time_derivatives(const CharacteristicMatrices& m, const Vector6& state,
                                 const std::array<Vector6, 3>& spatial_grads) {
    Vector6 rhs = -(m.B * state);
    for (int i = 0; i < 3; ++i) rhs -= m.Ai[i] * spatial_grads[i];
    Eigen::PartialPivLU<Matrix6> lu(m.A0);
    const Vector6 st = lu.solve(rhs);
    if (!st.allFinite())
        throw numerical_abort("recover_time_derivatives: singular A0 solve");
    return st;
}

double cfl_dt(const MovingGrid& g, double cfl) { return cfl * g.h(); }

namespace {

double edge_velocity(const FieldState& s, const MovingGrid& g) {
    // Quadratic extrapolation of u1/u0 to x = b from the first three cells.
    const double xs_arr[3] = {g.nodes[0], g.nodes[1], g.nodes[2]};
    const auto w = fd_weights(g.b, std::span<const double>(xs_arr, 3), 0);
    double v = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double u0 = std::sqrt(1.0 + s.u1[i] * s.u1[i]);
        v += w[i] * s.u1[i] / u0;
    }
    return v;
}

void apply_far_pin(FieldState& s, const MovingGrid& g, double t,
                   const EvolutionOptions& opt, const FieldState& initial) {
    const int n = g.n_cells;
    for (int q = n - 2; q < n; ++q) {
        switch (opt.far_pin) {
            case FarPin::none: break;
            case FarPin::initial:
                s.r[q] = initial.r[q];
                s.u1[q] = initial.u1[q];
                s.pi[q] = initial.pi[q];
                break;
            case FarPin::background: {
                const auto v = opt.far_values(t, g.nodes[q]);
                s.r[q] = v[0];
                s.u1[q] = v[1];
                s.pi[q] = v[2];
                break;
            }
        }
    }
}

}  // namespace

StageDerivative nonlinear_stage_derivative(const FieldState& s, const MovingGrid& g,
                                           const ModelConstants& c,
                                           const EvolutionOptions& opt) {
    const int n = g.n_cells;
    std::vector<double> u0(n);
    for (int q = 0; q < n; ++q) u0[q] = std::sqrt(1.0 + s.u1[q] * s.u1[q]);
    const auto dr = fd_derivative(s.r, 1, g, opt.fd_accuracy);
    const auto du0 = fd_derivative(u0, 1, g, opt.fd_accuracy);
    const auto du1 = fd_derivative(s.u1, 1, g, opt.fd_accuracy);
    const auto dpi = fd_derivative(s.pi, 1, g, opt.fd_accuracy);

    StageDerivative out;
    out.dr.resize(n);
    out.du1.resize(n);
    out.dpi.resize(n);
    for (int q = 0; q < n; ++q) {
        const Vec4 u{u0[q], s.u1[q], 0.0, 0.0};
        const CharacteristicMatrices m = assemble_matrices(s.r[q], s.pi[q], u, c);
        Vector6 state, dxs;
        state << s.r[q], u0[q], s.u1[q], 0.0, 0.0, s.pi[q];
        dxs << dr[q], du0[q], du1[q], 0.0, 0.0, dpi[q];
        const Vector6 st =
            recover_time_derivatives(m, state, {dxs, Vector6::Zero(), Vector6::Zero()});
        out.dr[q] = st(0);
        out.du1[q] = st(2);
        out.dpi[q] = st(5);
    }
    out.db = opt.move_boundary ? edge_velocity(s, g) : 0.0;
    return out;
}

void rk4_step(FieldState& s, MovingGrid& g, double& t, double dt,
              const ModelConstants& c, const EvolutionOptions& opt) {
    const int n = g.n_cells;
    const FieldState initial = s;

    auto axpy = [n](const FieldState& base, const StageDerivative& d, double a) {
        FieldState out = base;
        for (int q = 0; q < n; ++q) {
            out.r[q] += a * d.dr[q];
            out.u1[q] += a * d.du1[q];
            out.pi[q] += a * d.dpi[q];
        }
        return out;
    };

    const StageDerivative k1 = nonlinear_stage_derivative(s, g, c, opt);
    const StageDerivative k2 = nonlinear_stage_derivative(axpy(s, k1, 0.5 * dt), g, c, opt);
    const StageDerivative k3 = nonlinear_stage_derivative(axpy(s, k2, 0.5 * dt), g, c, opt);
    const StageDerivative k4 = nonlinear_stage_derivative(axpy(s, k3, dt), g, c, opt);

    double b_new = g.b;
    for (int q = 0; q < n; ++q) {
        s.r[q] += dt / 6.0 * (k1.dr[q] + 2 * k2.dr[q] + 2 * k3.dr[q] + k4.dr[q]);
        s.u1[q] += dt / 6.0 * (k1.du1[q] + 2 * k2.du1[q] + 2 * k3.du1[q] + k4.du1[q]);
        s.pi[q] += dt / 6.0 * (k1.dpi[q] + 2 * k2.dpi[q] + 2 * k3.dpi[q] + k4.dpi[q]);
    }
    b_new += dt / 6.0 * (k1.db + 2 * k2.db + 2 * k3.db + k4.db);
    t += dt;

    if (opt.move_boundary && b_new != g.b) {
        if (b_new >= g.x_far - 4.0 * g.h())
            throw domain_collapse_error("rk4_step: boundary reached far edge");
        const MovingGrid g_new = MovingGrid::uniform(b_new, g.x_far, n);
        s.r = interp_to_nodes(s.r, g, g_new);
        s.u1 = interp_to_nodes(s.u1, g, g_new);
        s.pi = interp_to_nodes(s.pi, g, g_new);
        g = g_new;
    }

    // The two cells nearest the vacuum edge may undershoot zero by
    // interpolation error; clamp them (boundary values are r = pi = 0).
    for (int q = 0; q < 2; ++q) {
        s.r[q] = std::max(s.r[q], 0.0);
        s.pi[q] = std::max(s.pi[q], 0.0);
    }
    apply_far_pin(s, g, t, opt, initial);

    for (int q = 0; q < n; ++q) {
        if (std::isnan(s.r[q]) || std::isnan(s.u1[q]) || std::isnan(s.pi[q]))
            throw numerical_abort("rk4_step: NaN at t=" + std::to_string(t) + ", node " +
                                  std::to_string(q) + ", x=" + std::to_string(g.nodes[q]));
    }
}

NonlinearRun evolve_nonlinear(const FieldState& initial, const MovingGrid& grid,
                              double T, double dt, const ModelConstants& c,
                              const EvolutionOptions& opt) {
    NonlinearRun run;
    const EvolutionOptions& o = opt;
    FieldState s = initial;
    MovingGrid g = grid;
    double t = 0.0;
    run.times.push_back(t);
    run.grids.push_back(g);
    run.states.push_back(s);
    const int nsteps = static_cast<int>(std::llround(T / dt));
    for (int step = 0; step < nsteps; ++step) {
        rk4_step(s, g, t, dt, c, o);
        run.times.push_back(t);
        run.grids.push_back(g);
        run.states.push_back(s);
    }
    return run;
}

CoefficientOdeRhs coefficient_ode_rhs(double r, double pi, double divu,
                                      const ModelConstants& c) {
    if (r < kRMin || pi < kRMin)
        throw degeneracy_error("coefficient_ode_rhs: interior positivity violated");
    const double k = c.kappa;
    const double inv_k = 1.0 / k;
    const double a0 = pi / r;
    const double lam = c.lambda_of_r(r);
    const double zeta = c.zeta_of_r(r);
    const double zeta_p = c.zeta_prime_of_r(r);
    const double a1 = r + 1.0 + r * r * std::pow(a0, 2.0 + inv_k);
    CoefficientOdeRhs out;
    out.dt_a0 = (k * (r + 1.0) * divu - 1.0) * a0 +
                (k * r * r * divu - lam * std::pow(r, 2.0 + inv_k)) * std::pow(a0, 3.0 + inv_k) -
                zeta / (r * std::pow(pi, 1.0 + inv_k)) * divu;
    out.dt_inv_a0 = (1.0 - k * (r + 1.0) * divu) / a0 +
                    (lam * std::pow(r, 2.0 + inv_k) - k * r * r * divu) * std::pow(a0, 1.0 + inv_k) +
                    zeta * r / std::pow(pi, 3.0 + inv_k) * divu;
    out.dt_zeta_ratio =
        divu * a1 * ((2.0 * k + 1.0) * zeta / std::pow(r, 2.0 + inv_k) - zeta_p / (r * r));
    return out;
}

ResidualFields manufactured_residual(
    const std::function<double(double, double)>& r_fn,
    const std::function<double(double, double)>& u1_fn,
    const std::function<double(double, double)>& pi_fn, double t, const MovingGrid& g,
    const ModelConstants& c, double dt_fd) {
    const int n = g.n_cells;
    std::vector<double> r(n), u1(n), pi(n), u0(n);
    std::vector<double> rt(n), u1t(n), pit(n), u0t(n);
    for (int q = 0; q < n; ++q) {
        const double x = g.nodes[q];
        r[q] = r_fn(t, x);
        u1[q] = u1_fn(t, x);
        pi[q] = pi_fn(t, x);
        u0[q] = std::sqrt(1.0 + u1[q] * u1[q]);
        rt[q] = (r_fn(t + dt_fd, x) - r_fn(t - dt_fd, x)) / (2 * dt_fd);
        u1t[q] = (u1_fn(t + dt_fd, x) - u1_fn(t - dt_fd, x)) / (2 * dt_fd);
        const double u1p = u1_fn(t + dt_fd, x), u1m = u1_fn(t - dt_fd, x);
        u0t[q] = (std::sqrt(1 + u1p * u1p) - std::sqrt(1 + u1m * u1m)) / (2 * dt_fd);
        pit[q] = (pi_fn(t + dt_fd, x) - pi_fn(t - dt_fd, x)) / (2 * dt_fd);
    }
    const auto rx = fd_derivative(r, 1, g);
    const auto u1x = fd_derivative(u1, 1, g);
    const auto u0x = fd_derivative(u0, 1, g);
    const auto pix = fd_derivative(pi, 1, g);

    ResidualFields out;
    out.r_eq.resize(n);
    out.u_eq.resize(n);
    out.pi_eq.resize(n);
    const double inv_k = 1.0 / c.kappa;
    for (int q = 0; q < n; ++q) {
        const CoefficientValues cv = coefficients_guarded(r[q], pi[q], c);
        const double divu = u0t[q] + u1x[q];
        const Vec4 u{u0[q], u1[q], 0, 0};
        const Mat4 delta = projection_tensor(u);
        const double Dtr = u0[q] * rt[q] + u1[q] * rx[q];
        const double Dtu1 = u0[q] * u1t[q] + u1[q] * u1x[q];
        const double Dtpi = u0[q] * pit[q] + u1[q] * pix[q];
        out.r_eq[q] = Dtr + c.kappa * r[q] * cv.a1 * divu;
        out.u_eq[q] = Dtu1 +
                      (1.0 + inv_k) * cv.a2 * (delta[1][0] * rt[q] + delta[1][1] * rx[q]) +
                      (2.0 + inv_k) * r[q] * cv.a3 *
                          (delta[1][0] * pit[q] + delta[1][1] * pix[q]);
        out.pi_eq[q] = Dtpi + pi[q] + c.lambda_of_r(r[q]) * std::pow(pi[q], 3.0 + inv_k) +
                       r[q] * cv.a4 * divu;
    }
    return out;
}

}  // namespace islab
