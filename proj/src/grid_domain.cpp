#include "islab/grid_domain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "islab/errors.hpp"

namespace islab {

MovingGrid MovingGrid::uniform(double b, double x_far, int n_cells) {
    if (!(x_far > b)) throw domain_error("MovingGrid: x_far must exceed b");
    if (n_cells < 8) throw size_error("MovingGrid: need at least 8 cells");
    MovingGrid g;
    g.b = b;
    g.x_far = x_far;
    g.n_cells = n_cells;
    const double h = (x_far - b) / n_cells;
    g.nodes.resize(n_cells);
    g.interior_mask.resize(n_cells);
    for (int q = 0; q < n_cells; ++q) {
        g.nodes[q] = b + (q + 0.5) * h;
        g.interior_mask[q] = (q >= 2 && q < n_cells - 2) ? 1 : 0;
    }
    return g;
}

std::vector<double> fd_weights(double z, std::span<const double> xs, int m) {
    // B. Fornberg, "Generation of finite difference formulas on arbitrarily
    // spaced grids", Math. Comp. 51 (1988).
    const int nd = static_cast<int>(xs.size()) - 1;
    if (nd < m) throw size_error("fd_weights: not enough nodes for derivative order");
    std::vector<std::vector<double>> c(nd + 1, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0;
    double c4 = xs[0] - z;
    c[0][0] = 1.0;
    for (int i = 1; i <= nd; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = xs[i] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(nd + 1);
    for (int i = 0; i <= nd; ++i) w[i] = c[i][m];
    return w;
}

namespace {

std::vector<double> derivative_uniform(std::span<const double> f, int order, double h,
                                       int accuracy) {
    const int n = static_cast<int>(f.size());
    int width = order + accuracy;
    if (width % 2 == 0) ++width;  // symmetric interior stencil
    if (n < width)
        throw size_error("fd_derivative: field has " + std::to_string(n) +
                         " nodes, stencil needs " + std::to_string(width));
    // Precompute weights for every offset of the window (uniform spacing, so
    // weights depend only on the position of z inside the window).
    std::vector<double> xs(width);
    for (int i = 0; i < width; ++i) xs[i] = i * h;
    std::vector<std::vector<double>> wtab(width);
    for (int p = 0; p < width; ++p) wtab[p] = fd_weights(xs[p], xs, order);

    std::vector<double> out(n);
    const int half = width / 2;
    for (int q = 0; q < n; ++q) {
        int start = std::clamp(q - half, 0, n - width);
        const int p = q - start;
        const auto& w = wtab[p];
        double acc = 0.0;
        for (int i = 0; i < width; ++i) acc += w[i] * f[start + i];
        out[q] = acc;
    }
    return out;
}

}  // namespace

std::vector<double> fd_derivative(std::span<const double> f, int order,
                                  const MovingGrid& g, int accuracy) {
    if (static_cast<int>(f.size()) != g.n_cells)
        throw size_error("fd_derivative: field size does not match grid");
    if (f.size() < 5) throw size_error("fd_derivative: need at least 5 nodes");
    return derivative_uniform(f, order, g.h(), accuracy);
}

std::vector<double> fd_derivative_axis(std::span<const double> f, int order, double h,
                                       int accuracy) {
    return derivative_uniform(f, order, h, accuracy);
}

double weighted_quadrature(std::span<const double> f, std::span<const double> r,
                           double sigma, const MovingGrid& g) {
    if (f.size() != r.size() || static_cast<int>(f.size()) != g.n_cells)
        throw size_error("weighted_quadrature: size mismatch");
    const double h = g.h();
    double acc = 0.0;
    for (std::size_t q = 0; q < f.size(); ++q) {
        const double w = (sigma == 0.0) ? 1.0 : std::pow(r[q], 2.0 * sigma);
        acc += h * w * f[q] * f[q];
    }
    if (std::isnan(acc)) throw numerical_abort("weighted_quadrature: NaN integrand");
    return acc;
}

double integrate(std::span<const double> f, const MovingGrid& g) {
    double acc = 0.0;
    for (double v : f) acc += v;
    return acc * g.h();
}

MovingGrid advance_boundary(const MovingGrid& g, double edge_velocity, double dt) {
    if (!(dt > 0.0)) throw domain_error("advance_boundary: dt must be positive");
    if (!std::isfinite(edge_velocity))
        throw domain_error("advance_boundary: non-finite edge velocity");
    const double b_new = g.b + dt * edge_velocity;
    if (b_new >= g.x_far - 4.0 * g.h())
        throw domain_collapse_error("advance_boundary: boundary reached far edge");
    return MovingGrid::uniform(b_new, g.x_far, g.n_cells);
}

double advance_boundary_rk4(double b, double t, double dt,
                            const std::function<double(double, double)>& v) {
    const double k1 = v(t, b);
    const double k2 = v(t + 0.5 * dt, b + 0.5 * dt * k1);
    const double k3 = v(t + 0.5 * dt, b + 0.5 * dt * k2);
    const double k4 = v(t + dt, b + dt * k3);
    return b + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

std::vector<double> interp_to_nodes(std::span<const double> f, const MovingGrid& from,
                                    const MovingGrid& to) {
    if (static_cast<int>(f.size()) != from.n_cells)
        throw size_error("interp_to_nodes: field size mismatch");
    const int n = from.n_cells;
    constexpr int width = 5;
    if (n < width) throw size_error("interp_to_nodes: too few source nodes");
    std::vector<double> out(to.n_cells);
    const double h = from.h();
    for (int q = 0; q < to.n_cells; ++q) {
        const double x = to.nodes[q];
        int center = static_cast<int>(std::floor((x - from.nodes[0]) / h + 0.5));
        int start = std::clamp(center - width / 2, 0, n - width);
        const auto w =
            fd_weights(x, std::span<const double>(from.nodes.data() + start, width), 0);
        double acc = 0.0;
        for (int i = 0; i < width; ++i) acc += w[i] * f[start + i];
        out[q] = acc;
    }
    return out;
}

FlowMapState integrate_flow_map(const std::function<Vec4(double, double)>& u,
                                std::span<const double> seeds, double T, double dt,
                                double b, double x_far) {
    FlowMapState state;
    state.tracer_count = static_cast<int>(seeds.size());
    state.trajectories.resize(seeds.size());
    const int nsteps = static_cast<int>(std::ceil(T / dt));
    for (std::size_t s = 0; s < seeds.size(); ++s) {
        Trajectory& traj = state.trajectories[s];
        double tau = 0.0, tc = 0.0, x = seeds[s];
        traj.samples.push_back({tau, tc, x});
        for (int step = 0; step < nsteps; ++step) {
            const double dtau = std::min(dt, T - tau);
            if (dtau <= 0.0) break;
            auto rhs = [&u](double tt, double xx) {
                const Vec4 v = u(tt, xx);
                return std::array<double, 2>{v[0], v[1]};
            };
            const auto k1 = rhs(tc, x);
            const auto k2 = rhs(tc + 0.5 * dtau * k1[0], x + 0.5 * dtau * k1[1]);
            const auto k3 = rhs(tc + 0.5 * dtau * k2[0], x + 0.5 * dtau * k2[1]);
            const auto k4 = rhs(tc + dtau * k3[0], x + dtau * k3[1]);
            tc += dtau / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
            x += dtau / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
            tau += dtau;
            if (x < b || x > x_far) {
                traj.exited = true;
                break;
            }
            traj.samples.push_back({tau, tc, x});
        }
    }
    return state;
}

double transport_theorem_residual(const std::function<double(double, double)>& f,
                                  const std::function<Vec4(double, double)>& u,
                                  double t, double dt, double b, double x_far,
                                  int n_cells) {
    auto vel = [&u](double tt, double xx) {
        const Vec4 uu = u(tt, xx);
        return uu[1] / uu[0];
    };
    // Advect both edges of the test domain with the fluid.
    auto edges_at = [&](double tt) {
        double lo = b, hi = x_far;
        const int sub = 32;
        const double step = (tt - t) / sub;
        double cur = t;
        for (int i = 0; i < sub && step != 0.0; ++i) {
            lo = advance_boundary_rk4(lo, cur, step, vel);
            hi = advance_boundary_rk4(hi, cur, step, vel);
            cur += step;
        }
        return std::array<double, 2>{lo, hi};
    };
    auto domain_integral = [&](double tt) {
        const auto e = edges_at(tt);
        const MovingGrid g = MovingGrid::uniform(e[0], e[1], n_cells);
        std::vector<double> vals(g.n_cells);
        for (int q = 0; q < g.n_cells; ++q) vals[q] = f(tt, g.nodes[q]);
        return integrate(vals, g);
    };
    const double lhs = (domain_integral(t + dt) - domain_integral(t - dt)) / (2.0 * dt);

    const MovingGrid g = MovingGrid::uniform(b, x_far, n_cells);
    std::vector<double> fx(g.n_cells), vq(g.n_cells), dtf(g.n_cells);
    for (int q = 0; q < g.n_cells; ++q) {
        const double x = g.nodes[q];
        fx[q] = f(t, x);
        vq[q] = vel(t, x);
        dtf[q] = (f(t + dt, x) - f(t - dt, x)) / (2.0 * dt);
    }
    const auto dfx = fd_derivative(fx, 1, g, 2);
    const auto dvq = fd_derivative(vq, 1, g, 2);
    std::vector<double> integrand(g.n_cells);
    for (int q = 0; q < g.n_cells; ++q) {
        const Vec4 uu = u(t, g.nodes[q]);
        const double mat = uu[0] * dtf[q] + uu[1] * dfx[q];  // D_t f
        integrand[q] = mat / uu[0] + fx[q] * dvq[q];
    }
    return lhs - integrate(integrand, g);
}

}  // namespace islab
