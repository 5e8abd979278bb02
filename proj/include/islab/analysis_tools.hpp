#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>

namespace islab {

struct GronwallInput {
    std::function<double(double)> a, b, c;
    double alpha = 0.5;  // in (0,1)
    double T = 1.0;
};

// Closed-form bound for d(t) <= c(t) + int_0^t [a d + b d^alpha]:
//   ( c^{1-alpha}(t) exp((1-alpha) int_0^t a)
//     + (1-alpha) int_0^t b(s) exp((1-alpha) int_s^t a) ds )^{1/(1-alpha)}.
// Nested integrals by composite Simpson on a fixed 2048-point partition.
double gronwall_bound(const GronwallInput& in, double t);

struct GronwallReport {
    int trials = 0;
    int failures = 0;
    double max_rel_excess = 0.0;      // max of (d - bound)/bound over all samples
    double max_saturation_gap = 0.0;  // max relative gap of the equality ODE
};

// Random (a, b, c, alpha): integrates the equality ODE d' = a d + b d^alpha,
// d(0) = c, and checks d(t) <= bound(t) (1 + 1e-6) plus saturation of the
// bound by the equality solution.
GronwallReport gronwall_verify(int trials, std::uint64_t seed);

enum class TermVariable { r_t, u_t, pi_t };

// r^a d^b (D_t^{dt_count}) X for X in {r~, u~, pi~}.
struct TermDescriptor {
    TermVariable var = TermVariable::r_t;
    int r_power = 0;     // a
    int deriv_count = 0; // b
    int dt_count = 0;    // material derivatives
};

// Exact half-integer arithmetic for the bookkeeping orders.
struct HalfInteger {
    int halves = 0;
    friend bool operator==(HalfInteger, HalfInteger) = default;
    friend auto operator<=>(HalfInteger, HalfInteger) = default;
    double value() const { return halves / 2.0; }
};

// order = b - a + (1/2 for u~/pi~) + dt_count / 2, except that the first
// material derivative of pi~ is free: the relaxation row supplies
// D_t pi~ = r d u~ + u~ + ..., so D_t r~, D_t u~, D_t pi~ carry orders
// 1/2, 1, 1/2.
HalfInteger term_order(const TermDescriptor& t);

// true iff every right-hand term has order <= the left term's order.
bool order_balance_check(const TermDescriptor& lhs, std::span<const TermDescriptor> rhs);

std::string to_string(HalfInteger h);

}  // namespace islab
