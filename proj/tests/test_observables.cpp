#include <catch_amalgamated.hpp>

#include <cmath>

#include "jtent/asymptotics.hpp"
#include "jtent/observables.hpp"

using namespace jtent;
using Catch::Approx;

TEST_CASE("zero coupling Bloch vector", "[observables]") {
    const ModelParams p = make_params(10, 0);
    const BlochVector b = bloch(p, refine_until(p, 1e-9));
    CHECK(std::abs(b.b_z + 1) < 1e-10);
    CHECK(std::abs(b.b_phi) < 1e-10);
}

TEST_CASE("strong coupling Bloch vector", "[observables]") {
    const ModelParams p = make_params(100, 10);
    const BlochVector b = bloch(p, refine_until(p, 1e-8));
    CHECK(b.b_z == Approx(-0.1).epsilon(0.02));
    CHECK(std::abs(b.b_phi) == Approx(std::sqrt(1 - 0.01)).epsilon(0.02));
    CHECK(b.b_phi < 0);
}

// Leading-order estimate b_z = -1 + (2 alpha/D^2)^(1/3) <x^2>. At D = 10 the
// solved value is -0.859, 4.4% from the estimate -0.823.
TEST_CASE("bifurcation Bloch z-component vs leading-order estimate at D = 10", "[observables][!shouldfail]") {
    const ModelParams p = make_params(10, 1);
    const BlochVector b = bloch(p, refine_until(p, 1e-8));
    CHECK(b.b_z == Approx(-1 + std::cbrt(0.02) * 0.6515).epsilon(0.03));
}

TEST_CASE("leading-order b_z estimate improves with D", "[observables]") {
    double prev = INFINITY;
    for (double D : {10.0, 100.0, 1000.0}) {
        const ModelParams p = make_params(D, 1);
        const BlochVector b = bloch(p, refine_until(p, 1e-8));
        const double est = -1 + std::cbrt(2 / (D * D)) * 0.6515;
        const double rel = std::abs(b.b_z / est - 1);
        CHECK(rel < prev);
        prev = rel;
    }
    CHECK(prev < 0.03);
}

TEST_CASE("unnormalized state is a contract error", "[observables]") {
    const ModelParams p = make_params(10, 1);
    RadialState s = solve_physical(p, default_physical_grid(p));
    for (double& v : s.phi) v *= 1.001;
    CHECK_THROWS_AS(bloch(p, s), ContractError);
}

TEST_CASE("Gram overlaps", "[observables]") {
    Gram g = overlaps({-1, 0});
    CHECK(g.aa == 0);
    CHECK(g.bb == 1);
    CHECK(g.ab == 0);
    g = overlaps({0, -1});
    CHECK(g.aa == 0.5);
    CHECK(g.bb == 0.5);
    CHECK(g.ab == 0.5);
    g = overlaps({-0.6, -0.5});
    CHECK(g.aa == Approx(0.2));
    CHECK(g.bb == Approx(0.8));
    CHECK(g.ab == Approx(0.25));
    // positive semidefinite for every point of the disk
    for (double t = 0; t < 6.3; t += 0.1) {
        const Gram h = overlaps({-std::abs(std::cos(t)), std::sin(t)});
        CHECK(h.aa * h.bb - h.ab * h.ab >= -1e-15);
    }
}

TEST_CASE("Gram overlaps match direct dressing integrals", "[observables]") {
    for (double a : {0.3, 1.0, 2.0, 4.0}) {
        const ModelParams p = make_params(10, a);
        const RadialState s = refine_until(p, 1e-8);
        const Gram g = overlaps(bloch(p, s));
        const Gram d = dressing_overlaps(p, s);
        CHECK(std::abs(g.aa - d.aa) < 1e-10);
        CHECK(std::abs(g.bb - d.bb) < 1e-10);
        CHECK(std::abs(g.ab - d.ab) < 1e-10);
    }
}

TEST_CASE("moments of the pure quartic state", "[observables]") {
    const RadialState s = refine_scaled(0.0, 1e-10);
    CHECK(moment(s, 0) == Approx(1).margin(1e-12));
    CHECK(moment(s, 2) == Approx(0.6515).margin(1e-3));
    // converged reference from an independent adaptive ODE shooting run
    CHECK(moment(s, 1) == Approx(0.7236947).margin(1e-6));
    CHECK(moment(s, 2) == Approx(0.6514778).margin(1e-6));
    CHECK(moment(s, 3) == Approx(0.676909).margin(1e-5));
    CHECK(moment(s, 4) == Approx(0.781610).margin(1e-5));
    CHECK_THROWS_AS(moment(s, 9), DomainError);
    CHECK_THROWS_AS(moment(s, -1), DomainError);
}

// The quoted <x> = 0.72737 is 3.7e-3 above the converged 0.72369.
TEST_CASE("quartic first moment vs quoted 0.72737", "[observables][!shouldfail]") {
    const RadialState s = refine_scaled(0.0, 1e-10);
    CHECK(moment(s, 1) == Approx(0.72737).margin(1e-3));
}

TEST_CASE("moment scaling identity at the bifurcation", "[observables]") {
    const double D = 10, a = 1;
    const ModelParams p = make_params(D, a);
    const RadialState phys = refine_radial(QuarticSurface{p}, default_physical_grid(p), 1e-9);
    const RadialState sc = refine_scaled(0.0, 1e-9);
    for (int nu = 1; nu <= 4; ++nu)
        CHECK(std::abs(moment(phys, nu) - std::pow(symanzik_length(a, D), nu) * moment(sc, nu)) < 1e-6);
}

TEST_CASE("Bloch components along the coupling axis", "[observables]") {
    double prev_phi = -1;
    double prev_z = -2;
    for (double a = 0; a <= 4.0001; a += 0.25) {
        const ModelParams p = make_params(10, a);
        const BlochVector b = bloch(p, refine_until(p, 1e-7));
        CHECK(std::abs(b.b_phi) >= prev_phi);
        CHECK(b.b_z >= prev_z);
        CHECK(b.length_squared() <= 1);
        CHECK(b.b_z < 0);
        prev_phi = std::abs(b.b_phi);
        prev_z = b.b_z;
    }
    const ModelParams big = make_params(10, 60);
    CHECK(bloch(big, refine_until(big, 1e-7)).b_z > -0.05);
}
