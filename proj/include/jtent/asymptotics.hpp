#pragma once

// Closed-form approximations for weak coupling, strong coupling and the
// neighbourhood of the bifurcation alpha = 1.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "jtent/errors.hpp"
#include "jtent/observables.hpp"
#include "jtent/radial.hpp"
#include "jtent/tangles.hpp"

namespace jtent {

enum class Regime { small_coupling, strong_coupling, critical };

inline const char* regime_name(Regime r) noexcept {
    switch (r) {
    case Regime::small_coupling: return "small_coupling";
    case Regime::strong_coupling: return "strong_coupling";
    case Regime::critical: return "critical";
    }
    return "?";
}

/// Partial tangle set; tau_Eq = tau_phiq = 0 in every regime.
struct RegimeTangles {
    double tau_E_phiq = 0.0;
    double tau_Ephi = 0.0;
    double tau_q_Ephi = 0.0;
    double residual = 0.0;
};

struct RegimeEstimate {
    Regime regime;
    RegimeTangles tangles;
    std::optional<BlochVector> bloch;
    std::string validity;
    double width = 0.0;  ///< k or kappa, oscillator frequency renormalization
    double center = 0.0; ///< Gaussian center (q0 for strong coupling)
};

inline void check_common(double alpha, double D) {
    if (!(D > 0.0) || !std::isfinite(D)) throw DomainError("D must be positive");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be nonnegative");
}

inline RegimeEstimate small_coupling(double alpha, double D) {
    check_common(alpha, D);
    if (alpha > 0.2) throw RegimeError("small-coupling estimate needs alpha <= 0.2, got " + std::to_string(alpha));
    RegimeEstimate e{Regime::small_coupling, {}, std::nullopt, "alpha <= 0.2 and D >= 10", std::sqrt(1.0 - alpha), 0.0};
    const double x = alpha / D;
    e.tangles.tau_E_phiq = 2.0 * x;
    e.tangles.tau_Ephi = std::numbers::pi / 2.0 * x;
    e.tangles.tau_q_Ephi = (2.0 - std::numbers::pi / 2.0) * x;
    e.tangles.residual = e.tangles.tau_q_Ephi;
    return e;
}

inline RegimeEstimate strong_coupling(double alpha, double D) {
    check_common(alpha, D);
    if (alpha < 5.0) throw RegimeError("strong-coupling estimate needs alpha >= 5, got " + std::to_string(alpha));
    const ModelParams p = make_params(D, alpha);
    RegimeEstimate e{Regime::strong_coupling, {}, std::nullopt, "alpha >= 5 and D >= 10",
                     std::sqrt(1.0 - 1.0 / (alpha * alpha)), apes_minimum(p).q0};
    const double t = 1.0 - 1.0 / (alpha * alpha);
    e.tangles.tau_E_phiq = t;
    e.tangles.tau_Ephi = t;
    e.tangles.tau_q_Ephi = 1.0 / (alpha * alpha * alpha * D);
    e.tangles.residual = 2.0 / 3.0 * e.tangles.tau_q_Ephi;
    // Bloch vector of a state pinned at q0, where Theta = D alpha
    e.bloch = BlochVector{-1.0 / alpha, -std::sqrt(t)};
    return e;
}

/// zeta = (2D/alpha^2)^(2/3) (1 - alpha)
inline double symanzik_zeta(double alpha, double D) {
    if (!(alpha > 0.0) || !(D > 0.0)) throw DomainError("symanzik_zeta needs alpha > 0 and D > 0");
    return std::cbrt(std::pow(2.0 * D / (alpha * alpha), 2.0)) * (1.0 - alpha);
}

/// Physical ground energy from the scaled eigenvalue: -D + (alpha^2/2D)^(1/3) e_g.
inline double symanzik_energy(double alpha, double D, double e_g) {
    if (!(alpha > 0.0) || !(D > 0.0)) throw DomainError("symanzik_energy needs alpha > 0 and D > 0");
    return -D + std::cbrt(alpha * alpha / (2.0 * D)) * e_g;
}

/// Inverse of the coordinate scaling: q = (2D/alpha^2)^(1/6) x.
inline double symanzik_length(double alpha, double D) { return std::pow(2.0 * D / (alpha * alpha), 1.0 / 6.0); }

struct QuarticMoments {
    double x1 = 0.0, x2 = 0.0, x3 = 0.0, x4 = 0.0;
    double e_g = 0.0;
};

/// Moments of the pure quartic ground state (zeta = 0), solved once.
inline const QuarticMoments& quartic_moments() {
    static const QuarticMoments m = [] {
        const RadialState s = refine_scaled(0.0, 1e-10);
        return QuarticMoments{moment(s, 1), moment(s, 2), moment(s, 3), moment(s, 4), s.energy};
    }();
    return m;
}

inline RegimeEstimate critical(double alpha, double D, const QuarticMoments& m) {
    check_common(alpha, D);
    if (alpha == 0.0) throw RegimeError("critical estimate needs alpha > 0");
    const double zeta = symanzik_zeta(alpha, D);
    if (std::abs(zeta) > 1.0) throw RegimeError("critical estimate needs |zeta| <= 1, got " + std::to_string(zeta));
    RegimeEstimate e{Regime::critical, {}, std::nullopt, "|zeta| <= 1 and D >= 10", 0.0, 0.0};
    const double s = 2.0 * alpha / (D * D);
    e.bloch = BlochVector{-1.0 + std::cbrt(s) * m.x2 - 1.5 * std::cbrt(s * s) * m.x4,
                          -std::sqrt(2.0) * (std::pow(s, 1.0 / 6.0) * m.x1 - std::sqrt(s) * m.x3)};
    const double c = std::cbrt(16.0 / (D * D)); // (4/D)^(2/3)
    e.tangles.tau_E_phiq = c * m.x2;
    e.tangles.tau_Ephi = c * m.x1 * m.x1;
    e.tangles.tau_q_Ephi = c * (m.x2 - m.x1 * m.x1);
    e.tangles.residual = e.tangles.tau_q_Ephi;
    return e;
}

inline RegimeEstimate critical(double alpha, double D) { return critical(alpha, D, quartic_moments()); }

} // namespace jtent
