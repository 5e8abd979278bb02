#include <cmath>

#include "doctest.h"
#include "islab/errors.hpp"
#include "islab/fluid_model.hpp"
#include "islab/grid_domain.hpp"

using namespace islab;

namespace {
constexpr double kPi = 3.14159265358979324;
}

TEST_CASE("grid construction") {
    const MovingGrid g = MovingGrid::uniform(0.0, 1.0, 64);
    CHECK(g.h() == doctest::Approx(1.0 / 64));
    CHECK(g.nodes.front() == doctest::Approx(0.5 / 64));
    CHECK(g.nodes.back() == doctest::Approx(1.0 - 0.5 / 64));
    CHECK(g.interior_mask[0] == 0);
    CHECK(g.interior_mask[1] == 0);
    CHECK(g.interior_mask[2] == 1);
    CHECK(g.interior_mask[63] == 0);
    for (int q = 1; q < 64; ++q)
        CHECK(g.nodes[q] - g.nodes[q - 1] == doctest::Approx(g.h()).epsilon(1e-14));
    CHECK_THROWS_AS(MovingGrid::uniform(1.0, 0.5, 64), domain_error);
}

TEST_CASE("finite differences: polynomial exactness and convergence") {
    const MovingGrid g = MovingGrid::uniform(0.0, 1.0, 64);
    std::vector<double> f(g.n_cells), want(g.n_cells);
    for (int q = 0; q < g.n_cells; ++q) {
        const double x = g.nodes[q];
        f[q] = x * x * x;
        want[q] = 3 * x * x;
    }
    const auto d1 = fd_derivative(f, 1, g);
    double worst = 0.0;
    for (int q = 0; q < g.n_cells; ++q) worst = std::max(worst, std::abs(d1[q] - want[q]));
    CHECK(worst <= 1e-11);

    for (int q = 0; q < g.n_cells; ++q) {
        const double x = g.nodes[q];
        f[q] = x * x * x * x;
        want[q] = 12 * x * x;
    }
    const auto d2 = fd_derivative(f, 2, g);
    worst = 0.0;
    for (int q = 0; q < g.n_cells; ++q) worst = std::max(worst, std::abs(d2[q] - want[q]));
    CHECK(worst <= 1e-9);

    // constants annihilated exactly
    std::vector<double> ones(g.n_cells, 1.0);
    for (const double v : fd_derivative(ones, 1, g)) CHECK(std::abs(v) <= 1e-13);

    auto err_at = [](int n) {
        const MovingGrid gg = MovingGrid::uniform(0.0, 1.0, n);
        std::vector<double> ff(n);
        for (int q = 0; q < n; ++q) ff[q] = std::sin(gg.nodes[q]);
        const auto dd = fd_derivative(ff, 1, gg);
        double w = 0.0;
        for (int q = 0; q < n; ++q)
            w = std::max(w, std::abs(dd[q] - std::cos(gg.nodes[q])));
        return w;
    };
    const double ratio = err_at(64) / err_at(128);
    CHECK(ratio > 10.0);
    CHECK(ratio < 24.0);

    std::vector<double> tiny(3, 0.0);
    CHECK_THROWS_AS(fd_derivative(tiny, 1, g), size_error);
}

TEST_CASE("weighted quadrature") {
    const MovingGrid g = MovingGrid::uniform(0.0, 1.0, 128);
    std::vector<double> one(g.n_cells, 1.0), r(g.n_cells), zero(g.n_cells, 0.0);
    for (int q = 0; q < g.n_cells; ++q) r[q] = g.nodes[q];
    CHECK(weighted_quadrature(one, r, 0.5, g) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(weighted_quadrature(zero, r, 0.5, g) == 0.0);
    CHECK(weighted_quadrature(one, r, 0.0, g) == doctest::Approx(1.0).epsilon(1e-13));

    // O(h^2) convergence for 2 sigma in {0, 1, 2}
    for (const double two_sigma : {0.0, 1.0, 2.0}) {
        auto integral_err = [two_sigma](int n) {
            const MovingGrid gg = MovingGrid::uniform(0.0, 1.0, n);
            std::vector<double> ff(n), rr(n);
            for (int q = 0; q < n; ++q) {
                ff[q] = std::sin(kPi * gg.nodes[q]) + 1.2;
                rr[q] = gg.nodes[q];
            }
            const double got = weighted_quadrature(ff, rr, two_sigma / 2.0, gg);
            const MovingGrid gfine = MovingGrid::uniform(0.0, 1.0, 4096);
            std::vector<double> f2(4096), r2(4096);
            for (int q = 0; q < 4096; ++q) {
                f2[q] = std::sin(kPi * gfine.nodes[q]) + 1.2;
                r2[q] = gfine.nodes[q];
            }
            return std::abs(got - weighted_quadrature(f2, r2, two_sigma / 2.0, gfine));
        };
        const double ratio = integral_err(64) / integral_err(128);
        CHECK(ratio >= 3.5);
        CHECK(ratio <= 4.5);
    }
}

TEST_CASE("boundary advance") {
    const MovingGrid g = MovingGrid::uniform(0.0, 1.0, 64);
    const MovingGrid g1 = advance_boundary(g, 0.0, 0.01);
    CHECK(g1.b == 0.0);
    const MovingGrid g2 = advance_boundary(g, 0.1, 0.01);
    CHECK(g2.b == doctest::Approx(0.001).epsilon(1e-15));
    CHECK(g2.n_cells == 64);
    CHECK(g2.nodes[1] - g2.nodes[0] == doctest::Approx(g2.h()).epsilon(1e-13));
    CHECK_THROWS_AS(advance_boundary(g, 150.0, 1.0), domain_collapse_error);

    // b(t) = b0 + 0.05 t^2 from v(t,x) = 0.1 t: one RK4 step is exact.
    const double b1 = advance_boundary_rk4(0.0, 0.0, 0.5,
                                           [](double t, double) { return 0.1 * t; });
    CHECK(b1 == doctest::Approx(0.05 * 0.25).epsilon(1e-14));

    // nonlinear edge law b' = b: classical 4th order
    auto rk_err = [](double dt) {
        double b = 1.0, t = 0.0;
        while (t < 1.0 - 1e-12) {
            b = advance_boundary_rk4(b, t, dt, [](double, double bb) { return bb; });
            t += dt;
        }
        return std::abs(b - std::exp(1.0));
    };
    const double ratio = rk_err(0.02) / rk_err(0.01);
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
}

TEST_CASE("interpolation onto a shifted grid") {
    const MovingGrid from = MovingGrid::uniform(0.0, 1.0, 64);
    const MovingGrid to = MovingGrid::uniform(0.013, 1.0, 64);
    std::vector<double> f(from.n_cells);
    for (int q = 0; q < from.n_cells; ++q) {
        const double x = from.nodes[q];
        f[q] = 1.0 + x - 0.5 * x * x + 0.25 * x * x * x + 0.1 * x * x * x * x;
    }
    const auto g = interp_to_nodes(f, from, to);
    double worst = 0.0;
    for (int q = 0; q < to.n_cells; ++q) {
        const double x = to.nodes[q];
        const double want = 1.0 + x - 0.5 * x * x + 0.25 * x * x * x + 0.1 * x * x * x * x;
        worst = std::max(worst, std::abs(g[q] - want));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("flow map") {
    const std::vector<double> seeds = {0.2, 0.5, 0.8};
    const auto rest = integrate_flow_map(
        [](double, double) { return Vec4{1, 0, 0, 0}; }, seeds, 1.0, 0.05, 0.0, 1.0);
    for (std::size_t s = 0; s < seeds.size(); ++s) {
        const auto& last = rest.trajectories[s].samples.back();
        CHECK(last.tcoord == doctest::Approx(last.tau).epsilon(1e-14));
        CHECK(last.x == doctest::Approx(seeds[s]).epsilon(1e-14));
    }

    // constant u: straight line of slope u1/u0 in (t, x)
    const Vec4 uc = normalize_velocity({0.3, 0, 0});
    const auto cst = integrate_flow_map(
        [&uc](double, double) { return uc; }, seeds, 0.8, 0.02, -1.0, 3.0);
    for (std::size_t s = 0; s < seeds.size(); ++s) {
        const auto& last = cst.trajectories[s].samples.back();
        CHECK(last.x - seeds[s] ==
              doctest::Approx((uc[1] / uc[0]) * last.tcoord).epsilon(1e-12));
    }

    // u1/u0 = x: x(t) = y e^t; 4th-order convergence in the step size
    auto ufield = [](double, double x) {
        const double u0 = 1.0 / std::sqrt(1.0 - x * x);
        return Vec4{u0, x * u0, 0, 0};
    };
    auto exp_err = [&](double dt) {
        const std::vector<double> y0 = {0.3};
        const auto fm = integrate_flow_map(ufield, y0, 0.5, dt, 0.0, 0.99);
        const auto& last = fm.trajectories[0].samples.back();
        return std::abs(last.x - 0.3 * std::exp(last.tcoord));
    };
    const double ratio = exp_err(0.02) / exp_err(0.01);
    CHECK(ratio > 10.0);
    CHECK(ratio < 26.0);

    // trajectories that leave the domain are marked exited, not fatal
    const auto out = integrate_flow_map(
        [&uc](double, double) { return uc; }, std::vector<double>{0.95}, 2.0, 0.05, 0.0, 1.0);
    CHECK(out.trajectories[0].exited);
}

TEST_CASE("moving-domain differentiation formula") {
    // static domain, time-independent f
    const double r0 = transport_theorem_residual(
        [](double, double x) { return 1.0 + x * x; },
        [](double, double) { return Vec4{1, 0, 0, 0}; }, 0.5, 1e-3, 0.0, 1.0, 128);
    CHECK(std::abs(r0) <= 1e-11);

    // f = 1 on a uniformly translating domain
    const Vec4 um = normalize_velocity({0.2, 0, 0});
    const double r1 = transport_theorem_residual(
        [](double, double) { return 1.0; }, [&um](double, double) { return um; }, 0.3,
        1e-3, 0.0, 1.0, 128);
    CHECK(std::abs(r1) <= 1e-7);

    // manufactured f(t,x) = e^{-t} x with a compressing velocity field
    auto uu = [](double, double x) {
        const double v = 0.1 + 0.2 * x * (1.0 - 0.4 * x);
        const double u0 = 1.0 / std::sqrt(1.0 - v * v);
        return Vec4{u0, v * u0, 0, 0};
    };
    auto ff = [](double t, double x) { return std::exp(-t) * x; };
    const double r2 = transport_theorem_residual(ff, uu, 0.2, 5e-4, 0.1, 1.1, 256);
    CHECK(std::abs(r2) <= 2e-5);

    // The variant without f in the second integrand misses by O(1): the
    // discrepancy equals int (1 - f) d_x(u1/u0) dx.
    const MovingGrid g = MovingGrid::uniform(0.1, 1.1, 256);
    std::vector<double> vq(g.n_cells), fx(g.n_cells);
    for (int q = 0; q < g.n_cells; ++q) {
        const Vec4 u4 = uu(0.2, g.nodes[q]);
        vq[q] = u4[1] / u4[0];
        fx[q] = ff(0.2, g.nodes[q]);
    }
    const auto dv = fd_derivative(vq, 1, g, 2);
    double printed_gap = 0.0;
    for (int q = 0; q < g.n_cells; ++q)
        printed_gap += (1.0 - fx[q]) * dv[q];
    printed_gap *= g.h();
    CHECK(std::abs(printed_gap) > 100.0 * std::abs(r2));
}
