#pragma once

// Bloch components of the qubit and radial moments of a solved state.

#include <cmath>
#include <string>

#include "jtent/errors.hpp"
#include "jtent/model.hpp"
#include "jtent/radial.hpp"

namespace jtent {

struct BlochVector {
    double b_z = -1.0;
    double b_phi = 0.0;

    [[nodiscard]] double length_squared() const noexcept { return b_z * b_z + b_phi * b_phi; }
};

inline constexpr double normalization_tolerance = 1e-10;

inline void require_normalized(const RadialState& state) {
    const double n = state.norm();
    if (!(std::abs(n - 1.0) <= normalization_tolerance))
        throw ContractError("state norm is " + std::to_string(n) + ", expected 1");
}

/// b_z = -<D/Theta>, b_phi = -<L q/Theta>, averages over q phi^2 dq.
inline BlochVector bloch(const ModelParams& p, const RadialState& state) {
    require_normalized(state);
    BlochVector b{0.0, 0.0};
    for (std::size_t i = 0; i < state.phi.size(); ++i) {
        const double q = state.grid.node(i);
        const double w = state.weight(i) / p.theta(q);
        b.b_z -= w * p.D;
        b.b_phi -= w * p.L * q;
    }
    return b;
}

/// Gram matrix of the unnormalized oscillator states |a>, |b> that multiply
/// |up> and |down> in the ground state.
struct Gram {
    double aa = 0.0;
    double bb = 1.0;
    double ab = 0.0;
};

// ab is <a|b> = int q phi^2 a b dq with a b = L q / (2 Theta), hence -b_phi/2.
inline Gram overlaps(const BlochVector& b) noexcept {
    return Gram{(1.0 + b.b_z) / 2.0, (1.0 - b.b_z) / 2.0, -b.b_phi / 2.0};
}

/// Same Gram entries integrated directly from a(q), b(q).
inline Gram dressing_overlaps(const ModelParams& p, const RadialState& state) {
    Gram g{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < state.phi.size(); ++i) {
        const DressingPair d = dressing(p, state.grid.node(i));
        const double w = state.weight(i);
        g.aa += w * d.a * d.a;
        g.bb += w * d.b * d.b;
        g.ab += w * d.a * d.b;
    }
    return g;
}

/// <q^nu> with measure q phi^2 dq (x dx for scaled states).
inline double moment(const RadialState& state, int nu) {
    if (nu < 0 || nu > 8) throw DomainError("moment order must be in [0, 8], got " + std::to_string(nu));
    return state.integrate([nu](double q) { return std::pow(q, nu); });
}

} // namespace jtent
