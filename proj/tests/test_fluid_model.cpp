#include <cmath>

#include "doctest.h"
#include "islab/errors.hpp"
#include "islab/fluid_model.hpp"
#include "islab/rng.hpp"

using namespace islab;

TEST_CASE("velocity normalization") {
    const Vec4 rest = normalize_velocity({0.0, 0.0, 0.0});
    CHECK(rest[0] == 1.0);
    CHECK(rest[1] == 0.0);

    const Vec4 a = normalize_velocity({0.3, 0.0, 0.0});
    CHECK(a[0] == doctest::Approx(std::sqrt(1.09)).epsilon(1e-15));
    const Vec4 b = normalize_velocity({0.3, 0.4, 0.0});
    CHECK(b[0] == doctest::Approx(std::sqrt(1.25)).epsilon(1e-15));

    CounterRng rng(11);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const Vec4 u = normalize_velocity(
            {rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9)});
        worst = std::max(worst, std::abs(minkowski_dot(u, u) + 1.0));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("projection tensor") {
    const Mat4 rest = projection_tensor(Vec4{1, 0, 0, 0});
    CHECK(rest[0][0] == 0.0);
    CHECK(rest[1][1] == 1.0);
    CHECK(rest[2][2] == 1.0);
    CHECK(rest[0][1] == 0.0);

    const Vec4 u = normalize_velocity({0.3, 0.0, 0.0});
    const Mat4 d = projection_tensor(u);
    CHECK(d[0][0] == doctest::Approx(0.09).epsilon(1e-12));

    CounterRng rng(12);
    double worst = 0.0, asym = 0.0;
    for (int i = 0; i < 100; ++i) {
        const Vec4 v = normalize_velocity(
            {rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8)});
        const Mat4 dd = projection_tensor(v);
        const Vec4 vl = lower_index(v);
        for (int al = 0; al < 4; ++al) {
            double contraction = 0.0;
            for (int be = 0; be < 4; ++be) {
                contraction += dd[al][be] * vl[be];
                asym = std::max(asym, std::abs(dd[al][be] - dd[be][al]));
            }
            worst = std::max(worst, std::abs(contraction));
        }
    }
    CHECK(worst <= 1e-12);
    CHECK(asym <= 1e-12);

    CHECK_THROWS_AS(projection_tensor(Vec4{1.2, 0, 0, 0}), domain_error);
}

TEST_CASE("stress energy tensor") {
    const ModelConstants c = ModelConstants::defaults(1.0);
    const Mat4 vac = stress_energy(0.0, Vec4{1, 0, 0, 0}, 0.0, c);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) CHECK(vac[a][b] == 0.0);

    const Mat4 t = stress_energy(1.0, Vec4{1, 0, 0, 0}, 0.0, c);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            CHECK(t[a][b] == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-14));

    CounterRng rng(13);
    for (int i = 0; i < 50; ++i) {
        const double rho = rng.uniform(0.0, 2.0);
        const double Pi = rng.uniform(0.0, 0.5);
        const Vec4 u = normalize_velocity(
            {rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6)});
        const Mat4 tt = stress_energy(rho, u, Pi, c);
        double proj = 0.0;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) proj += u[a] * u[b] * tt[a][b];
        CHECK(proj == doctest::Approx(rho).epsilon(1e-11));
    }
}

TEST_CASE("variable transform and round trip") {
    const ModelConstants c1 = ModelConstants::defaults(1.0);
    PrimitiveState s;
    s.rho = {0.0, 4.0};
    s.Pi = {0.0, 8.0};
    s.u = {Vec4{1, 0, 0, 0}, Vec4{1, 0, 0, 0}};
    const TransformedState t = transform(s, c1);
    CHECK(t.r[0] == 0.0);
    CHECK(t.pi[0] == 0.0);
    CHECK(t.r[1] == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(t.pi[1] == doctest::Approx(2.0).epsilon(1e-14));

    const ModelConstants chalf = ModelConstants::defaults(0.5);
    PrimitiveState s2;
    s2.rho = {9.0};
    s2.Pi = {1.0};
    s2.u = {Vec4{1, 0, 0, 0}};
    CHECK(transform(s2, chalf).r[0] == doctest::Approx(3.0).epsilon(1e-14));

    CounterRng rng(14);
    for (const double kap : {0.5, 1.0, 2.0}) {
        const ModelConstants c = ModelConstants::defaults(kap);
        PrimitiveState in;
        for (int i = 0; i < 40; ++i) {
            in.rho.push_back(rng.uniform(1e-3, 3.0));
            in.Pi.push_back(rng.uniform(1e-3, 1.0));
            in.u.push_back(Vec4{1, 0, 0, 0});
        }
        const PrimitiveState back = inverse_transform(transform(in, c), c);
        for (std::size_t i = 0; i < in.rho.size(); ++i) {
            CHECK(back.rho[i] == doctest::Approx(in.rho[i]).epsilon(1e-12));
            CHECK(back.Pi[i] == doctest::Approx(in.Pi[i]).epsilon(1e-12));
        }
    }
    PrimitiveState bad;
    bad.rho = {-1.0};
    bad.Pi = {0.0};
    bad.u = {Vec4{1, 0, 0, 0}};
    CHECK_THROWS_AS(transform(bad, c1), domain_error);
}

TEST_CASE("coefficient fields") {
    const ModelConstants c = ModelConstants::defaults(1.0);
    const CoefficientValues v = coefficients_at(1.0, 1.0, c);
    CHECK(v.a0 == doctest::Approx(1.0));
    CHECK(v.a1 == doctest::Approx(3.0));
    CHECK(v.a2 == doctest::Approx(1.0 / 3.0));
    CHECK(v.a3 == doctest::Approx(1.0 / 3.0));
    CHECK(v.a4 == doctest::Approx(1.0));

    // pi -> 0 at fixed r: a0 -> 0 and a1 -> r + 1.
    const CoefficientValues lim = coefficients_at(0.5, 1e-8, c);
    CHECK(lim.a0 == doctest::Approx(2e-8).epsilon(1e-12));
    CHECK(lim.a1 == doctest::Approx(1.5).epsilon(1e-12));

    CounterRng rng(15);
    for (int i = 0; i < 200; ++i) {
        const double r = rng.uniform(1e-4, 2.0);
        const double pi = rng.uniform(1e-4, 2.0);
        const CoefficientValues w = coefficients_at(r, pi, c);
        CHECK(w.a1 * w.a2 == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(w.a1 >= 1.0);
        CHECK(std::isfinite(w.a4));
    }
    CHECK_THROWS_AS(coefficients_at(0.0, 1.0, c), degeneracy_error);
    CHECK_THROWS_AS(coefficients_at(1.0, 0.0, c), degeneracy_error);
}

TEST_CASE("causality margin") {
    ModelConstants c = ModelConstants::defaults(1.0);
    CHECK(c.tau_pi == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(causality_margin(0.0, 0.0, c) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(causality_margin(0.1, 0.0, c) ==
          doctest::Approx(0.8 - 0.003 / 0.11).epsilon(1e-14));
    CHECK(causality_margin(1.0, 0.0, c) == doctest::Approx(-2.5).epsilon(1e-14));
    CHECK(causality_margin(1.0, 0.0, c) < 0.0);
    CHECK_THROWS_AS(causality_margin(0.0, -1.0, c), degeneracy_error);
}

TEST_CASE("four acceleration") {
    const ModelConstants c = ModelConstants::defaults(1.0);
    const Vec4 rest{1, 0, 0, 0};
    const Vec4 zero{0, 0, 0, 0};
    const Vec4 a0 = four_acceleration(0.4, 0.3, rest, zero, zero, c);
    for (int i = 0; i < 4; ++i) CHECK(a0[i] == 0.0);

    // rho = d, Pi = d^3 near the edge: r = d, pi = d, and a^1 -> -2.
    for (const double d : {1e-2, 1e-3, 1e-4}) {
        const Vec4 grad{0, 1, 0, 0};
        const Vec4 a = four_acceleration(d, d, rest, grad, grad, c);
        CHECK(a[1] == doctest::Approx(-2.0).epsilon(20 * d));
    }

    CounterRng rng(16);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const Vec4 u = normalize_velocity(
            {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)});
        const Vec4 gr{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
        const Vec4 gp{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
        const Vec4 a =
            four_acceleration(rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0), u, gr, gp, c);
        double dot = 0.0;
        const Vec4 ul = lower_index(u);
        for (int al = 0; al < 4; ++al) dot += ul[al] * a[al];
        worst = std::max(worst, std::abs(dot));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("vacuum boundary classification") {
    CHECK(classify_boundary(1.0, 3.0, 1.0) == BoundaryClass::bounded_nonzero);
    CHECK(classify_boundary(2.0, 1.5, 1.0) == BoundaryClass::unbounded);
    CHECK(classify_boundary(2.0, 4.0, 1.0) == BoundaryClass::zero);
    for (const double kap : {0.5, 1.0, 2.0, 3.0})
        CHECK(classify_boundary(1.0 / kap, 1.0 / kap + 2.0, kap) ==
              BoundaryClass::bounded_nonzero);
    // eta = sigma + 1 with sigma >= 1/kappa gives the other bounded branch.
    CHECK(classify_boundary(1.5, 2.5, 1.0) == BoundaryClass::bounded_nonzero);
    CHECK(classify_boundary(0.5, 3.0, 1.0) == BoundaryClass::unbounded);
    CHECK_THROWS_AS(classify_boundary(-1.0, 2.0, 1.0), domain_error);
}

TEST_CASE("decay exponent fit") {
    std::vector<double> d(12), f(12);
    for (int i = 0; i < 12; ++i) d[i] = 2e-3 * std::pow(5.0, i / 11.0);
    for (int i = 0; i < 12; ++i) f[i] = d[i];
    CHECK(fit_decay_exponent(f, d).exponent == doctest::Approx(1.0).epsilon(1e-10));
    for (int i = 0; i < 12; ++i) f[i] = d[i] * d[i] * d[i];
    CHECK(fit_decay_exponent(f, d).exponent == doctest::Approx(3.0).epsilon(1e-10));
    for (int i = 0; i < 12; ++i) f[i] = d[i] * (1.0 + 0.1 * d[i]);
    CHECK(fit_decay_exponent(f, d).exponent == doctest::Approx(1.0).epsilon(1e-3));
    f[3] = -1.0;
    CHECK_THROWS_AS(fit_decay_exponent(f, d), domain_error);
}

TEST_CASE("transport coefficient bounds") {
    const ModelConstants c = ModelConstants::defaults(1.0, 0.7);
    CHECK_NOTHROW(check_transport_bounds(c, 1e-4, 2.0));
    ModelConstants bad = c;
    bad.zeta_fn = [](double) { return 0.0; };
    CHECK_THROWS_AS(check_transport_bounds(bad, 1e-4, 2.0), domain_error);
}
