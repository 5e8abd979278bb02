#include <cmath>

#include "doctest.h"
#include "islab/analysis_tools.hpp"
#include "islab/errors.hpp"

using namespace islab;

TEST_CASE("gronwall closed form") {
    GronwallInput in;
    in.T = 2.0;

    // a = b = 0: bound reduces to c for any alpha
    in.a = [](double) { return 0.0; };
    in.b = [](double) { return 0.0; };
    in.c = [](double) { return 1.7; };
    for (const double alpha : {0.2, 0.5, 0.8}) {
        in.alpha = alpha;
        CHECK(gronwall_bound(in, 1.3) == doctest::Approx(1.7).epsilon(1e-12));
    }

    // b = 0, a = 1: classical Gronwall c e^t, independent of alpha
    in.a = [](double) { return 1.0; };
    in.alpha = 0.37;
    CHECK(gronwall_bound(in, 1.5) ==
          doctest::Approx(1.7 * std::exp(1.5)).epsilon(1e-9));

    // b -> 0 limit is uniform
    in.b = [](double) { return 1e-12; };
    CHECK(gronwall_bound(in, 1.5) ==
          doctest::Approx(1.7 * std::exp(1.5)).epsilon(1e-9));

    // alpha = 1/2, a = 0, b = 1, c = 1: (1 + t/2)^2 exactly
    in.a = [](double) { return 0.0; };
    in.b = [](double) { return 1.0; };
    in.c = [](double) { return 1.0; };
    in.alpha = 0.5;
    for (const double t : {0.3, 1.0, 2.0})
        CHECK(gronwall_bound(in, t) ==
              doctest::Approx((1 + 0.5 * t) * (1 + 0.5 * t)).epsilon(1e-12));

    in.alpha = 1.2;
    CHECK_THROWS_AS(gronwall_bound(in, 0.5), domain_error);
    in.alpha = 0.5;
    CHECK_THROWS_AS(gronwall_bound(in, 3.0), domain_error);
}

TEST_CASE("gronwall verification harness") {
    const GronwallReport rep = gronwall_verify(100, 7);
    CHECK(rep.trials == 100);
    CHECK(rep.failures == 0);
    CHECK(rep.max_saturation_gap <= 1e-6);
}

TEST_CASE("gronwall stress near alpha = 1") {
    GronwallInput in;
    in.alpha = 0.99;
    in.T = 1.0;
    in.a = [](double) { return 0.3; };
    in.b = [](double) { return 0.5; };
    in.c = [](double) { return 1.0; };
    // equality ODE by RK4
    double d = 1.0;
    const int nsteps = 4000;
    const double dt = in.T / nsteps;
    auto rhs = [&in](double, double y) {
        return 0.3 * y + 0.5 * std::pow(y, in.alpha);
    };
    for (int i = 0; i < nsteps; ++i) {
        const double s = i * dt;
        const double k1 = rhs(s, d);
        const double k2 = rhs(s + dt / 2, d + dt / 2 * k1);
        const double k3 = rhs(s + dt / 2, d + dt / 2 * k2);
        const double k4 = rhs(s + dt, d + dt * k3);
        d += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    const double bound = gronwall_bound(in, in.T);
    CHECK(d <= bound * (1 + 1e-4));
    CHECK(std::abs(d - bound) / bound <= 1e-4);
}

TEST_CASE("bookkeeping order calculus") {
    CHECK(term_order({TermVariable::r_t, 0, 0, 1}) == HalfInteger{1});   // D_t r~
    CHECK(term_order({TermVariable::u_t, 1, 1, 0}) == HalfInteger{1});   // r d u~
    CHECK(term_order({TermVariable::u_t, 0, 0, 0}) == HalfInteger{1});   // u~
    CHECK(term_order({TermVariable::u_t, 0, 0, 1}) == HalfInteger{2});   // D_t u~
    CHECK(term_order({TermVariable::pi_t, 0, 0, 1}) == HalfInteger{1});  // D_t pi~
    CHECK(term_order({TermVariable::r_t, 0, 1, 0}) == HalfInteger{2});   // d r~

    // r^a d^{l+a} r~ has order l for any a
    for (int a = 0; a <= 4; ++a)
        for (int l = 0; l <= 3; ++l)
            CHECK(term_order({TermVariable::r_t, a, l + a, 0}) == HalfInteger{2 * l});

    // applying d adds one; multiplying by r subtracts one
    const TermDescriptor base{TermVariable::pi_t, 2, 3, 1};
    const HalfInteger o = term_order(base);
    CHECK(term_order({TermVariable::pi_t, 2, 4, 1}).halves == o.halves + 2);
    CHECK(term_order({TermVariable::pi_t, 3, 3, 1}).halves == o.halves - 2);
    // each material derivative adds a half
    CHECK(term_order({TermVariable::pi_t, 2, 3, 2}).halves == o.halves + 1);

    CHECK(to_string(HalfInteger{1}) == "1/2");
    CHECK(to_string(HalfInteger{2}) == "1");
}

TEST_CASE("order balance") {
    const TermDescriptor dt_r{TermVariable::r_t, 0, 0, 1};
    const TermDescriptor r_du{TermVariable::u_t, 1, 1, 0};
    const TermDescriptor u{TermVariable::u_t, 0, 0, 0};
    const TermDescriptor rhs1[] = {r_du, u};
    CHECK(order_balance_check(dt_r, rhs1));

    const TermDescriptor dt_u{TermVariable::u_t, 0, 0, 1};
    const TermDescriptor d_r{TermVariable::r_t, 0, 1, 0};
    const TermDescriptor rhs2[] = {d_r};
    CHECK(order_balance_check(dt_u, rhs2));

    const TermDescriptor dt_pi{TermVariable::pi_t, 0, 0, 1};
    const TermDescriptor d2_r{TermVariable::r_t, 0, 2, 0};
    const TermDescriptor rhs3[] = {d2_r};
    CHECK_FALSE(order_balance_check(dt_pi, rhs3));
}
