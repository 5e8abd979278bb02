#include "islab/analysis_tools.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "islab/errors.hpp"
#include "islab/rng.hpp"

namespace islab {

namespace {

constexpr int kPanels = 2048;  // composite Simpson panels (even count)

double simpson(const std::function<double(double)>& f, double lo, double hi, int panels) {
    if (hi <= lo) return 0.0;
    const double h = (hi - lo) / panels;
    double acc = f(lo) + f(hi);
    for (int i = 1; i < panels; ++i) acc += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

}  // namespace

double gronwall_bound(const GronwallInput& in, double t) {
    if (!(in.alpha > 0.0 && in.alpha < 1.0))
        throw domain_error("gronwall_bound: alpha must lie in (0,1)");
    if (t < 0.0 || t > in.T) throw domain_error("gronwall_bound: t outside [0,T]");
    const double om = 1.0 - in.alpha;
    // A(s) = int_0^s a, tabulated once so the nested exponential integral reuses it.
    std::vector<double> acum(kPanels + 1, 0.0);
    const double h = (t > 0.0) ? t / kPanels : 0.0;
    for (int i = 1; i <= kPanels && t > 0.0; ++i) {
        const double lo = (i - 1) * h, hi = i * h;
        acum[i] = acum[i - 1] +
                  (h / 6.0) * (in.a(lo) + 4.0 * in.a(0.5 * (lo + hi)) + in.a(hi));
    }
    const double At = acum[kPanels];
    auto A_of = [&](double s) {
        if (t <= 0.0) return 0.0;
        const double pos = std::clamp(s / h, 0.0, static_cast<double>(kPanels));
        const int i = std::min(static_cast<int>(pos), kPanels - 1);
        const double frac = pos - i;
        return acum[i] * (1.0 - frac) + acum[i + 1] * frac;
    };
    const double head = std::pow(in.c(t), om) * std::exp(om * At);
    const double tail =
        om * simpson([&](double s) { return in.b(s) * std::exp(om * (At - A_of(s))); },
                     0.0, t, kPanels);
    return std::pow(head + tail, 1.0 / om);
}

GronwallReport gronwall_verify(int trials, std::uint64_t seed) {
    GronwallReport rep;
    rep.trials = trials;
    CounterRng rng(seed);
    for (int trial = 0; trial < trials; ++trial) {
        const double alpha = rng.uniform(0.1, 0.9);
        const double a0 = rng.uniform(0.0, 1.5);
        const double a1 = rng.uniform(0.0, 1.0);
        const double b0 = rng.uniform(0.0, 1.5);
        const double b1 = rng.uniform(0.0, 1.0);
        const double c0 = rng.uniform(0.2, 2.0);
        const double T = rng.uniform(0.3, 1.5);
        GronwallInput in;
        in.alpha = alpha;
        in.T = T;
        in.a = [a0, a1](double s) { return a0 + a1 * s; };
        in.b = [b0, b1](double s) { return b0 + b1 * s * s; };
        in.c = [c0](double) { return c0; };

        // Equality ODE d' = a d + b d^alpha, d(0) = c0, integrated by RK4.
        const int nsteps = 2000;
        const double dt = T / nsteps;
        double d = c0;
        double worst_excess = 0.0, worst_gap = 0.0;
        auto rhs = [&](double s, double y) {
            return in.a(s) * y + in.b(s) * std::pow(std::max(y, 0.0), alpha);
        };
        for (int i = 0; i < nsteps; ++i) {
            const double s = i * dt;
            const double k1 = rhs(s, d);
            const double k2 = rhs(s + 0.5 * dt, d + 0.5 * dt * k1);
            const double k3 = rhs(s + 0.5 * dt, d + 0.5 * dt * k2);
            const double k4 = rhs(s + dt, d + dt * k3);
            d += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
            if ((i + 1) % 200 == 0) {
                const double bound = gronwall_bound(in, std::min(s + dt, T));
                worst_excess = std::max(worst_excess, (d - bound) / bound);
                worst_gap = std::max(worst_gap, std::abs(d - bound) / bound);
            }
        }
        rep.max_rel_excess = std::max(rep.max_rel_excess, worst_excess);
        rep.max_saturation_gap = std::max(rep.max_saturation_gap, worst_gap);
        if (worst_excess > 1e-6) ++rep.failures;
    }
    return rep;
}

HalfInteger term_order(const TermDescriptor& t) {
    int halves = 2 * (t.deriv_count - t.r_power) + t.dt_count;
    if (t.var != TermVariable::r_t) halves += 1;
    // The first material derivative of pi~ is supplied by the relaxation row,
    // whose velocity source carries an extra factor of r (D_t pi~ = r d u~ + u~
    // + ...), so it costs nothing: D_t pi~ sits at order 1/2, not 1.
    if (t.var == TermVariable::pi_t && t.dt_count >= 1) halves -= 1;
    return {halves};
}

bool order_balance_check(const TermDescriptor& lhs, std::span<const TermDescriptor> rhs) {
    const HalfInteger lo = term_order(lhs);
    return std::all_of(rhs.begin(), rhs.end(),
                       [lo](const TermDescriptor& t) { return term_order(t) <= lo; });
}

std::string to_string(HalfInteger h) {
    if (h.halves % 2 == 0) return std::to_string(h.halves / 2);
    return std::to_string(h.halves) + "/2";
}

}  // namespace islab
