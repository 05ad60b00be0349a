#include <catch_amalgamated.hpp>

#include <cmath>

#include "jtent/model.hpp"

using namespace jtent;
using Catch::Approx;

TEST_CASE("make_params examples and round trip", "[model]") {
    CHECK(make_params(10, 0).L == 0.0);
    CHECK(make_params(10, 1).L == Approx(std::sqrt(20.0)).epsilon(1e-15));
    const ModelParams p = make_params(10, 2.45);
    CHECK(p.L == Approx(7.0).epsilon(1e-14));
    const ModelParams back = make_params_from_coupling(p.D, p.L);
    CHECK(std::abs(back.alpha - 2.45) / 2.45 < 1e-14);
    for (double a : {0.0, 0.3, 1.0, 7.25, 120.0}) {
        const ModelParams q = make_params(37.5, a);
        CHECK(q.alpha == a);
        if (a > 0) CHECK(std::abs(q.L * q.L / (2 * q.D) - a) / a < 1e-14);
    }
}

TEST_CASE("make_params rejects invalid input", "[model]") {
    CHECK_THROWS_AS(make_params(0, 1), DomainError);
    CHECK_THROWS_AS(make_params(-1, 1), DomainError);
    CHECK_THROWS_AS(make_params(10, -0.1), DomainError);
    CHECK_THROWS_AS(make_params(std::nan(""), 1), DomainError);
}

TEST_CASE("physical constructor", "[model]") {
    // omega = 2, delta = 10, lambda = sqrt(2)  ->  D = 10, L = 2
    const ModelParams p = make_params_physical(2.0, 10.0, std::sqrt(2.0));
    CHECK(p.D == Approx(10.0));
    CHECK(p.L == Approx(2.0));
    CHECK(p.alpha == Approx(0.2));
}

TEST_CASE("apes_eval examples", "[model]") {
    const ApesPoint a = apes_eval(make_params(10, 0), 3);
    CHECK(a.theta == 10.0);
    CHECK(a.w_minus == -1.0);
    CHECK(a.w_plus == 19.0);
    const ApesPoint b = apes_eval(make_params(10, 1), 0);
    CHECK(b.theta == 10.0);
    CHECK(b.w_minus == -10.0);
    const ApesPoint c = apes_eval(make_params(10, 2), std::sqrt(7.5));
    CHECK(c.w_minus == Approx(-12.5).epsilon(1e-14));
    CHECK_THROWS_AS(apes_eval(make_params(10, 1), -0.5), DomainError);
}

TEST_CASE("apes_minimum examples", "[model]") {
    auto m = apes_minimum(make_params(10, 0.5));
    CHECK(m.q0 == 0.0);
    CHECK(m.w_min == -10.0);
    m = apes_minimum(make_params(10, 2));
    CHECK(m.q0 == Approx(2.73861278752583).epsilon(1e-13));
    CHECK(m.w_min == Approx(-12.5).epsilon(1e-14));
    m = apes_minimum(make_params(10, 1));
    CHECK(m.q0 == 0.0);
    CHECK(m.w_min == -10.0);
}

TEST_CASE("surface invariants", "[model]") {
    for (double D : {5.0, 10.0, 100.0})
        for (double a : {0.0, 0.4, 1.0, 2.5, 9.0}) {
            const ModelParams p = make_params(D, a);
            for (double q = 0.0; q < 20.0; q += 0.37) {
                const ApesPoint pt = apes_eval(p, q);
                CHECK(pt.theta >= p.D);
                CHECK(pt.theta >= p.L * q * (1 - 1e-15));
                CHECK(pt.w_minus <= pt.w_plus);
            }
        }
}

TEST_CASE("minimum is stationary and stable above the bifurcation", "[model]") {
    for (double D : {10.0, 50.0})
        for (double a : {1.2, 2.0, 5.0}) {
            const ModelParams p = make_params(D, a);
            const double q0 = apes_minimum(p).q0;
            const double h = 1e-5;
            const double d1 = (lower_surface(p, q0 + h) - lower_surface(p, q0 - h)) / (2 * h);
            const double d2 = (lower_surface(p, q0 + h) - 2 * lower_surface(p, q0) + lower_surface(p, q0 - h)) / (h * h);
            CHECK(std::abs(d1) < 1e-8 * std::max(1.0, D));
            CHECK(d2 > 0.0);
            CHECK(lower_surface(p, q0) == Approx(apes_minimum(p).w_min).epsilon(1e-13));
        }
}

TEST_CASE("lower surface increases below the bifurcation", "[model]") {
    for (double a : {0.0, 0.3, 0.9, 1.0}) {
        const ModelParams p = make_params(10, a);
        double prev = lower_surface(p, 0.0);
        for (double q = 0.01; q < 10.0; q += 0.01) {
            const double w = lower_surface(p, q);
            CHECK(w > prev);
            prev = w;
        }
    }
}

TEST_CASE("quartic expansion error is the sextic term", "[model]") {
    // next term of the expansion is -alpha^3 q^6 / (2 D^2)
    for (double D : {10.0, 100.0})
        for (double a : {0.5, 1.0, 2.0}) {
            const ModelParams p = make_params(D, a);
            const double q_max = 0.1 * std::sqrt(D) / a;
            for (double q = q_max / 20; q <= q_max; q += q_max / 20) {
                const double sextic = a * a * a * std::pow(q, 6) / (2 * D * D);
                const double diff = quartic_surface(p, q) - lower_surface(p, q);
                CHECK(diff > -1e-13);
                CHECK(diff == Approx(sextic).epsilon(0.05).margin(1e-13)); // rounding floor ~ eps D
            }
        }
}

// Over q <= 0.1 sqrt(D)/alpha the dropped sextic term reaches 5e-7 D/alpha^3,
// so a 1e-8 bound only holds for D/alpha^3 < 0.02.
TEST_CASE("quartic expansion within 1e-8 up to q = 0.1 sqrt(D)/alpha", "[model][!shouldfail]") {
    for (double D : {10.0, 100.0})
        for (double a : {0.5, 1.0, 2.0}) {
            const ModelParams p = make_params(D, a);
            const double q_max = 0.1 * std::sqrt(D) / a;
            for (double q = 0.0; q <= q_max; q += q_max / 20)
                CHECK(std::abs(lower_surface(p, q) - quartic_surface(p, q)) < 1e-8);
        }
}

TEST_CASE("dressing amplitudes", "[model]") {
    const ModelParams p = make_params(10, 1);
    const DressingPair z = dressing(p, 0.0);
    CHECK(z.a == 0.0);
    CHECK(z.b == 1.0);
    const DressingPair far = dressing(p, 1e9);
    CHECK(far.a == Approx(1 / std::sqrt(2.0)).epsilon(1e-8));
    CHECK(far.b == Approx(1 / std::sqrt(2.0)).epsilon(1e-8));

    const ModelParams p2 = make_params(10, 2);
    const double q0 = apes_minimum(p2).q0;
    CHECK(apes_eval(p2, q0).theta == Approx(20.0).epsilon(1e-14));
    CHECK(dressing(p2, q0).a == Approx(0.5).epsilon(1e-14));

    double prev = -1;
    for (double q = 0; q < 30; q += 0.05) {
        const DressingPair d = dressing(p, q);
        CHECK(std::abs(d.a * d.a + d.b * d.b - 1.0) < 1e-14);
        const double th = p.theta(q);
        CHECK(d.a * d.a == Approx((1 - p.D / th) / 2).margin(1e-15));
        CHECK(d.b * d.b == Approx((1 + p.D / th) / 2).margin(1e-15));
        CHECK(d.a >= prev);
        CHECK(d.a <= 1 / std::sqrt(2.0) + 1e-15);
        CHECK(d.b >= 1 / std::sqrt(2.0) - 1e-15);
        prev = d.a;
    }
}

TEST_CASE("rotated-field components", "[model]") {
    // zero-field limit at q = 2, lz = -1/2
    const LambdaComponents z = lambda_components(make_params_from_coupling(1e-8, 1.0), 2.0, -0.5);
    CHECK(z.lambda0 == Approx(1.0 / 16).epsilon(1e-6));
    CHECK(z.lambda_x == Approx(1.0 / 8).epsilon(1e-6));
    CHECK(std::abs(z.lambda_y) < 1e-6);
    CHECK(std::abs(z.lambda_z) < 1e-6);

    const LambdaComponents n = lambda_components(make_params(10, 0), 1.0, 0.5);
    CHECK(n.lambda0 == Approx(0.25));
    CHECK(n.lambda_x == 0.0);
    CHECK(n.lambda_y == 0.0);

    // reference from an independent high-precision evaluation
    const LambdaComponents c = lambda_components(make_params(10, 1), 1.0, -0.5);
    CHECK(c.lambda0 == Approx(0.284722222222222).epsilon(1e-13));
    CHECK(c.lambda_x == Approx(0.0798981464819432).epsilon(1e-13));
    CHECK(c.lambda_y == Approx(-0.372677996249965).epsilon(1e-13));
    CHECK(c.lambda_z == Approx(-0.912870929175277).epsilon(1e-13));

    CHECK_THROWS_AS(lambda_components(make_params(10, 1), 0.0, -0.5), SingularityError);
    CHECK_THROWS_AS(lambda_components(make_params(10, 1), -1.0, -0.5), DomainError);
}
