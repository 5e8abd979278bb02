#include <cmath>

#include "doctest.h"
#include "islab/errors.hpp"
#include "islab/grid_domain.hpp"
#include "islab/nonlinear_evolution.hpp"
#include "islab/rng.hpp"

using namespace islab;

namespace {
constexpr double kPi = 3.14159265358979324;

ModelConstants constant_lambda_model(double kappa, double lam) {
    ModelConstants c = ModelConstants::defaults(kappa);
    c.lambda_fn = [lam](double) { return lam; };
    c.lambda_prime_fn = [](double) { return 0.0; };
    return c;
}

// Bernoulli closed form for pi' = -pi - lam pi^q with q = 3 + 1/kappa and
// constant lam: y = pi^{1-q} satisfies y' = (q-1)(y + lam).
double relaxation_exact(double pi0, double lam, double q, double t) {
    const double y0 = std::pow(pi0, 1.0 - q);
    const double y = (y0 + lam) * std::exp((q - 1.0) * t) - lam;
    return std::pow(y, 1.0 / (1.0 - q));
}

}  // namespace

TEST_CASE("material right-hand sides at a static state") {
    const ModelConstants c = constant_lambda_model(1.0, 0.2);
    const int n = 16;
    TransformedState ts;
    ts.r.assign(n, 0.6);
    ts.pi.assign(n, 0.5);
    ts.u.assign(n, Vec4{1, 0, 0, 0});
    SpacetimeGradients grads;
    grads.dr.assign(n, Vec4{0, 0, 0, 0});
    grads.dpi.assign(n, Vec4{0, 0, 0, 0});
    grads.du.assign(n, zero_mat4());
    const CoefficientSet coeffs = coefficients(ts, c);
    const NonlinearRHS rhs = nonlinear_rhs(ts, coeffs, grads, c);
    for (int q = 0; q < n; ++q) {
        CHECK(rhs.dr[q] == 0.0);
        for (int a = 0; a < 4; ++a) CHECK(rhs.du[q][a] == 0.0);
        CHECK(rhs.dpi[q] ==
              doctest::Approx(-0.5 - 0.2 * std::pow(0.5, 4.0)).epsilon(1e-14));
    }
}

TEST_CASE("material right-hand sides against an independent evaluation") {
    const ModelConstants c = ModelConstants::defaults(1.0, 0.8);
    TransformedState ts;
    SpacetimeGradients grads;
    const double probes[3][2] = {{0.4, 0.35}, {0.7, 0.6}, {0.15, 0.2}};
    for (const auto& p : probes) {
        ts.r.push_back(p[0]);
        ts.pi.push_back(p[1]);
        ts.u.push_back(normalize_velocity({0.25, 0.0, 0.0}));
        Vec4 dr{0.05, 0.5, 0, 0};
        Vec4 dpi{-0.02, 0.3, 0, 0};
        Mat4 du = zero_mat4();
        du[0][0] = 0.01;
        du[0][1] = 0.04;
        du[1][0] = 0.06;
        du[1][1] = 0.2;
        grads.dr.push_back(dr);
        grads.dpi.push_back(dpi);
        grads.du.push_back(du);
    }
    const CoefficientSet coeffs = coefficients(ts, c);
    const NonlinearRHS rhs = nonlinear_rhs(ts, coeffs, grads, c);
    for (std::size_t q = 0; q < ts.r.size(); ++q) {
        const double r = ts.r[q], pi = ts.pi[q];
        const double a0 = pi / r;
        const double a1 = r + 1 + r * r * a0 * a0 * a0;
        const double divu = grads.du[q][0][0] + grads.du[q][1][1];
        CHECK(rhs.dr[q] == doctest::Approx(-r * a1 * divu).epsilon(1e-13));
        const double lam = c.lambda_of_r(r);
        const double a4 = std::pow(r, 3.0) / (r * pi * pi);
        CHECK(rhs.dpi[q] ==
              doctest::Approx(-pi - lam * std::pow(pi, 4.0) - r * a4 * divu)
                  .epsilon(1e-12));
        // spatial momentum row
        const Vec4 u = ts.u[q];
        const double d11 = 1.0 + u[1] * u[1];
        const double d10 = u[1] * u[0];
        const double want_du1 =
            -(2.0 / a1) * (d10 * grads.dr[q][0] + d11 * grads.dr[q][1]) -
            3.0 * r * (a0 * a0 / a1) * (d10 * grads.dpi[q][0] + d11 * grads.dpi[q][1]);
        CHECK(rhs.du[q][1] == doctest::Approx(want_du1).epsilon(1e-12));
    }
}

TEST_CASE("characteristic matrices") {
    const ModelConstants c = ModelConstants::defaults(1.0);

    // rest frame: first-column couplings vanish (Delta^{alpha 0} = 0)
    const CharacteristicMatrices rest =
        assemble_matrices(0.5, 0.4, Vec4{1, 0, 0, 0}, c);
    for (int a = 0; a < 4; ++a) CHECK(rest.A0(1 + a, 0) == 0.0);
    CHECK(rest.A0(0, 0) == 1.0);
    CHECK(rest.A0(5, 5) == 1.0);

    // B has a single nonzero entry 1 + lambda pi^{2+1/k}
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            if (i != 5 || j != 5) CHECK(rest.B(i, j) == 0.0);
    CHECK(rest.B(5, 5) ==
          doctest::Approx(1.0 + c.lambda_of_r(0.5) * std::pow(0.4, 3.0)));

    // A0 inverse sanity on random states
    CounterRng rng(31);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const Vec4 u = normalize_velocity(
            {rng.uniform(-0.4, 0.4), rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)});
        const CharacteristicMatrices m =
            assemble_matrices(rng.uniform(0.01, 0.8), rng.uniform(0.01, 0.8), u, c);
        const Matrix6 err = m.A0 * m.A0.inverse() - Matrix6::Identity();
        worst = std::max(worst, err.cwiseAbs().maxCoeff());
    }
    CHECK(worst <= 1e-12);

    // invertibility margin near the boundary regime
    double min_det = 1e30;
    for (int i = 0; i < 200; ++i) {
        const Vec4 u = normalize_velocity({rng.uniform(-0.3, 0.3), 0.0, 0.0});
        const CharacteristicMatrices m = assemble_matrices(
            rng.uniform(1e-4, 0.1), rng.uniform(1e-4, 0.1), u, c);
        min_det = std::min(min_det, std::abs(m.A0.determinant()));
    }
    CHECK(min_det >= 0.5);

    // (A0)^{-1} pi-row entries scale like r against the r and u inputs
    auto pi_row_entry = [&c](double r) {
        const CharacteristicMatrices m =
            assemble_matrices(r, r, normalize_velocity({0.2, 0, 0}), c);
        const Matrix6 inv = m.A0.inverse();
        return std::abs(inv(5, 0)) + std::abs(inv(5, 1));
    };
    const double scale_ratio = pi_row_entry(1e-3) / pi_row_entry(1e-4);
    CHECK(scale_ratio > 5.0);
    CHECK(scale_ratio < 15.0);
}

TEST_CASE("time-derivative recovery matches the material form at rest") {
    const ModelConstants c = constant_lambda_model(1.0, 0.15);
    const CharacteristicMatrices m = assemble_matrices(0.5, 0.4, Vec4{1, 0, 0, 0}, c);
    Vector6 state;
    state << 0.5, 1.0, 0.0, 0.0, 0.0, 0.4;
    const Vector6 dt =
        recover_time_derivatives(m, state, {Vector6::Zero(), Vector6::Zero(), Vector6::Zero()});
    CHECK(dt(0) == doctest::Approx(0.0));
    CHECK(dt(2) == doctest::Approx(0.0));
    CHECK(dt(5) == doctest::Approx(-0.4 - 0.15 * std::pow(0.4, 4.0)).epsilon(1e-13));
}

TEST_CASE("rk4: static equilibrium is a fixed point") {
    const ModelConstants c = ModelConstants::defaults(1.0);
    MovingGrid g = MovingGrid::uniform(0.0, 1.0, 64);
    FieldState s;
    s.r.assign(64, 0.5);
    s.u1.assign(64, 0.0);
    s.pi.assign(64, 0.0);
    EvolutionOptions opt;
    opt.far_pin = FarPin::none;
    opt.move_boundary = false;
    double t = 0.0;
    rk4_step(s, g, t, 1e-2, c, opt);
    for (int q = 0; q < 64; ++q) {
        CHECK(std::abs(s.r[q] - 0.5) <= 1e-12);
        CHECK(std::abs(s.u1[q]) <= 1e-12);
        CHECK(std::abs(s.pi[q]) <= 1e-12);
    }
}

TEST_CASE("rk4: homogeneous relaxation matches the closed form") {
    const double lam = 0.2, q = 4.0;
    const ModelConstants c = constant_lambda_model(1.0, lam);
    MovingGrid g = MovingGrid::uniform(0.0, 1.0, 64);
    FieldState s;
    s.r.assign(64, 0.6);
    s.u1.assign(64, 0.0);
    s.pi.assign(64, 0.5);
    EvolutionOptions opt;
    opt.far_pin = FarPin::none;
    opt.move_boundary = false;
    double t = 0.0;
    const double dt = 1e-2;
    for (int i = 0; i < 50; ++i) rk4_step(s, g, t, dt, c, opt);
    const double want = relaxation_exact(0.5, lam, q, t);
    for (int qn = 0; qn < 64; ++qn)
        CHECK(s.pi[qn] == doctest::Approx(want).epsilon(1e-8));
}

TEST_CASE("rk4 self-convergence on a smooth pulse") {
    const ModelConstants c = ModelConstants::defaults(1.0, 0.5);
    auto initial = [](const MovingGrid& g) {
        FieldState s;
        const int n = g.n_cells;
        s.r.resize(n);
        s.u1.resize(n);
        s.pi.resize(n);
        for (int q = 0; q < n; ++q) {
            const double x = g.nodes[q];
            const double bump = std::exp(-std::pow((x - 0.5) / 0.1, 2.0));
            s.r[q] = 0.25 + 0.04 * bump;
            s.u1[q] = 0.04 * bump;
            s.pi[q] = 0.22 + 0.03 * bump;
        }
        return s;
    };
    EvolutionOptions opt;
    opt.far_pin = FarPin::none;
    opt.move_boundary = false;
    const double T = 0.1;
    auto run = [&](int n) {
        const MovingGrid g = MovingGrid::uniform(0.0, 1.0, n);
        const double dt = T / std::llround(T / cfl_dt(g, 0.4));
        return evolve_nonlinear(initial(g), g, T, dt, c, opt);
    };
    const NonlinearRun r1 = run(64);
    const NonlinearRun r2 = run(128);
    const NonlinearRun r3 = run(256);
    // restrict to the coarse nodes by high-order interpolation
    auto err_on_coarse = [&](const NonlinearRun& coarse, const NonlinearRun& fine) {
        const auto ri = interp_to_nodes(fine.states.back().r, fine.grids.back(),
                                        coarse.grids.back());
        double worst = 0.0;
        for (int q = 4; q < coarse.grids.back().n_cells - 4; ++q)
            worst = std::max(worst, std::abs(ri[q] - coarse.states.back().r[q]));
        return worst;
    };
    const double e1 = err_on_coarse(r1, r3);
    const double e2 = err_on_coarse(r2, r3);
    // with a (h,dt) -> (h/2, dt/2) refinement the error should drop ~16x;
    // the self-convergence estimate against the 4x reference biases the
    // ratio slightly, so accept anything consistent with order >= 3.5
    CHECK(e1 / e2 >= 11.0);
}

TEST_CASE("coefficient evolution laws") {
    const ModelConstants c0 = constant_lambda_model(1.0, 0.0);

    // frozen values at kappa = 1, r = pi = 1, lambda = 0
    const CoefficientOdeRhs still = coefficient_ode_rhs(1.0, 1.0, 0.0, c0);
    CHECK(still.dt_a0 == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(still.dt_inv_a0 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(still.dt_zeta_ratio == doctest::Approx(0.0));

    const CoefficientOdeRhs expanding = coefficient_ode_rhs(1.0, 1.0, 1.0, c0);
    CHECK(expanding.dt_a0 == doctest::Approx(1.0).epsilon(1e-14));

    // product rule: d/dt (a0 * 1/a0) = 0 pointwise
    const ModelConstants c = ModelConstants::defaults(1.0, 0.6);
    CounterRng rng(32);
    for (int i = 0; i < 100; ++i) {
        const double r = rng.uniform(0.05, 1.5);
        const double pi = rng.uniform(0.05, 1.5);
        const double divu = rng.uniform(-1.0, 1.0);
        const CoefficientOdeRhs o = coefficient_ode_rhs(r, pi, divu, c);
        const double a0 = pi / r;
        CHECK(std::abs(o.dt_a0 / a0 + a0 * o.dt_inv_a0) <=
              1e-10 * (std::abs(o.dt_a0) + std::abs(o.dt_inv_a0) + 1.0));
    }

    // zeta-ratio law against a direct chain rule with a non-power zeta
    ModelConstants cz = ModelConstants::defaults(1.0, 0.4);
    cz.zeta_fn = [](double rho) { return std::pow(rho, 3.0) * (1.0 + 0.3 * rho); };
    cz.zeta_prime_fn = [](double rho) {
        return 3.0 * rho * rho + 1.2 * std::pow(rho, 3.0);
    };
    for (int i = 0; i < 50; ++i) {
        const double r = rng.uniform(0.1, 1.2);
        const double pi = rng.uniform(0.1, 1.2);
        const double divu = rng.uniform(-1.0, 1.0);
        auto ratio_of = [&cz](double rr) {
            return cz.zeta_of_r(rr) / std::pow(rr, 3.0);
        };
        const double a0 = pi / r;
        const double a1 = r + 1 + r * r * std::pow(a0, 3.0);
        const double dtr = -1.0 * r * a1 * divu;  // kappa = 1
        const double dr = 1e-6 * r;
        const double chain = (ratio_of(r + dr) - ratio_of(r - dr)) / (2 * dr) * dtr;
        const CoefficientOdeRhs o = coefficient_ode_rhs(r, pi, divu, cz);
        CHECK(o.dt_zeta_ratio == doctest::Approx(chain).epsilon(1e-7));
    }

    // one-step consistency: Richardson time derivative of a0 along the
    // evolution matches (D_t a0 - u1 dx a0)/u0 from the evolution law
    {
        const ModelConstants cc = ModelConstants::defaults(1.0, 0.5);
        const int n = 96;
        const MovingGrid g = MovingGrid::uniform(0.0, 1.0, n);
        FieldState base;
        base.r.resize(n);
        base.u1.resize(n);
        base.pi.resize(n);
        for (int q = 0; q < n; ++q) {
            const double x = g.nodes[q];
            base.r[q] = 0.3 + 0.1 * std::sin(kPi * x);
            base.u1[q] = 0.1 * std::sin(2 * kPi * x);
            base.pi[q] = 0.28 + 0.05 * std::cos(kPi * x);
        }
        EvolutionOptions opt;
        opt.far_pin = FarPin::none;
        opt.move_boundary = false;
        auto a0_after = [&](double dt) {
            FieldState s = base;
            MovingGrid gg = g;
            double t = 0.0;
            rk4_step(s, gg, t, dt, cc, opt);
            std::vector<double> a0(n);
            for (int q = 0; q < n; ++q) a0[q] = s.pi[q] / s.r[q];
            return a0;
        };
        const int probe = n / 2;
        auto residual_at = [&](double dt) {
            const auto a1v = a0_after(dt);
            const auto a2v = a0_after(2 * dt);
            std::vector<double> a0_now(n), u0(n);
            for (int q = 0; q < n; ++q) {
                a0_now[q] = base.pi[q] / base.r[q];
                u0[q] = std::sqrt(1.0 + base.u1[q] * base.u1[q]);
            }
            const double richardson =
                (4.0 * a1v[probe] - 3.0 * a0_now[probe] - a2v[probe]) / (2.0 * dt);
            const auto da0 = fd_derivative(a0_now, 1, g);
            const auto du1 = fd_derivative(base.u1, 1, g);
            std::vector<double> u0x(n);
            for (int q = 0; q < n; ++q) u0x[q] = base.u1[q] / u0[q];
            // div u needs dt u0; recover it from the system at the probe node
            const Vec4 u = normalize_velocity({base.u1[probe], 0, 0});
            const CharacteristicMatrices m =
                assemble_matrices(base.r[probe], base.pi[probe], u, cc);
            Vector6 st, dx;
            const auto dr = fd_derivative(base.r, 1, g);
            const auto du0 = fd_derivative(u0, 1, g);
            const auto dpi = fd_derivative(base.pi, 1, g);
            st << base.r[probe], u0[probe], base.u1[probe], 0, 0, base.pi[probe];
            dx << dr[probe], du0[probe], du1[probe], 0, 0, dpi[probe];
            const Vector6 ts =
                recover_time_derivatives(m, st, {dx, Vector6::Zero(), Vector6::Zero()});
            const double divu = ts(1) + du1[probe];
            const CoefficientOdeRhs law =
                coefficient_ode_rhs(base.r[probe], base.pi[probe], divu, cc);
            const double expected_dt =
                (law.dt_a0 - base.u1[probe] * da0[probe]) / u0[probe];
            return std::abs(richardson - expected_dt);
        };
        const double res1 = residual_at(2e-3);
        const double res2 = residual_at(1e-3);
        CHECK(res1 <= 1e-4);
        CHECK(res1 / res2 > 2.5);  // O(dt^2) Richardson residual
    }
}

TEST_CASE("manufactured residual") {
    const double lam = 0.25;
    const ModelConstants c = constant_lambda_model(1.0, lam);
    const MovingGrid g = MovingGrid::uniform(0.0, 1.0, 96);

    // exact spatially homogeneous relaxation solution has tiny residuals
    auto pi_exact = [lam](double t, double) { return relaxation_exact(0.4, lam, 4.0, t); };
    const ResidualFields res = manufactured_residual(
        [](double, double) { return 0.5; }, [](double, double) { return 0.0; }, pi_exact,
        0.2, g, c);
    for (int q = 0; q < g.n_cells; ++q) {
        CHECK(std::abs(res.r_eq[q]) <= 1e-9);
        CHECK(std::abs(res.u_eq[q]) <= 1e-9);
        CHECK(std::abs(res.pi_eq[q]) <= 1e-7);
    }

    // static equilibrium: all residuals vanish
    const ResidualFields eq = manufactured_residual(
        [](double, double) { return 0.5; }, [](double, double) { return 0.0; },
        [](double, double) { return 0.0; }, 0.0, g, c);
    for (int q = 0; q < g.n_cells; ++q) {
        CHECK(eq.r_eq[q] == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(std::abs(eq.pi_eq[q]) <= 1e-12);
    }

    // a linear-in-d profile with motion is not a solution: nonzero residual
    const ResidualFields lin = manufactured_residual(
        [](double, double x) { return 0.4 * x; },
        [](double, double x) { return 0.1 * x; },
        [](double, double x) { return 0.36 * x; }, 0.0, g, c);
    double mx = 0.0;
    for (int q = 2; q < g.n_cells - 2; ++q) mx = std::max(mx, std::abs(lin.r_eq[q]));
    CHECK(mx > 1e-3);
}
