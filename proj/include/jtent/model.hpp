#pragma once

// Model parameters, adiabatic potential surfaces and qubit dressing for the
// E x epsilon Jahn-Teller system in a transverse field.
//
// Everything downstream is dimensionless: energies in units of omega/2,
// coordinates in oscillator units.

#include <cmath>
#include <string>

#include "jtent/errors.hpp"

namespace jtent {

struct ModelParams {
    double D = 0.0;     ///< field, 2*Delta/omega
    double L = 0.0;     ///< coupling, 2*sqrt(2)*lambda/omega
    double alpha = 0.0; ///< L^2 / (2 D)

    /// Magnitude of the q-dependent effective field, sqrt(D^2 + L^2 q^2).
    [[nodiscard]] double theta(double q) const noexcept { return std::hypot(D, L * q); }
};

/// Builds parameters from the field D and the ratio alpha = L^2/(2D).
inline ModelParams make_params(double D, double alpha) {
    if (!(D > 0.0) || !std::isfinite(D))
        throw DomainError("D must be positive and finite, got " + std::to_string(D));
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw DomainError("alpha must be nonnegative and finite, got " + std::to_string(alpha));
    return ModelParams{D, std::sqrt(2.0 * D * alpha), alpha};
}

/// Builds parameters from the field D and the coupling L directly.
/// Used for the D -> 0 checks at fixed L.
inline ModelParams make_params_from_coupling(double D, double L) {
    if (!(D > 0.0) || !std::isfinite(D))
        throw DomainError("D must be positive and finite, got " + std::to_string(D));
    if (!(L >= 0.0) || !std::isfinite(L))
        throw DomainError("L must be nonnegative and finite, got " + std::to_string(L));
    return ModelParams{D, L, L * L / (2.0 * D)};
}

/// Builds parameters from oscillator frequency, field strength and coupling.
inline ModelParams make_params_physical(double omega, double delta, double lambda_c) {
    if (!(omega > 0.0)) throw DomainError("omega must be positive");
    if (!(delta > 0.0)) throw DomainError("delta must be positive");
    if (!(lambda_c >= 0.0)) throw DomainError("lambda must be nonnegative");
    return make_params_from_coupling(2.0 * delta / omega, 2.0 * std::sqrt(2.0) * lambda_c / omega);
}

struct ApesPoint {
    double q = 0.0;
    double theta = 0.0;
    double w_minus = 0.0;
    double w_plus = 0.0;
};

/// Lower sheet W-(q) = q^2 - Theta(q).
inline double lower_surface(const ModelParams& p, double q) noexcept { return q * q - p.theta(q); }

inline ApesPoint apes_eval(const ModelParams& p, double q) {
    if (!(q >= 0.0)) throw DomainError("q must be nonnegative, got " + std::to_string(q));
    const double th = p.theta(q);
    return ApesPoint{q, th, q * q - th, q * q + th};
}

struct ApesMinimum {
    double q0 = 0.0;
    double w_min = 0.0;
};

/// Minimum of the lower sheet. alpha <= 1 is the single-well branch.
inline ApesMinimum apes_minimum(const ModelParams& p) noexcept {
    if (p.alpha <= 1.0) return {0.0, -p.D};
    return {std::sqrt(0.5 * p.D * (p.alpha - 1.0 / p.alpha)), -0.5 * p.D * (p.alpha + 1.0 / p.alpha)};
}

/// Small-q expansion of the lower sheet, -D + (1-alpha) q^2 + alpha^2 q^4 / (2D).
inline double quartic_surface(const ModelParams& p, double q) noexcept {
    const double q2 = q * q;
    return -p.D + (1.0 - p.alpha) * q2 + p.alpha * p.alpha / (2.0 * p.D) * q2 * q2;
}

struct DressingPair {
    double a = 0.0; ///< weight of |up> in the lower adiabatic state
    double b = 1.0; ///< weight of |down>
};

// a^2 = (1 - D/Theta)/2 is evaluated as L^2 q^2 / (2 Theta (Theta + D))
// to avoid cancellation at small q.
inline DressingPair dressing(const ModelParams& p, double q) {
    if (!(q >= 0.0)) throw DomainError("q must be nonnegative, got " + std::to_string(q));
    const double th = p.theta(q);
    return DressingPair{p.L * q / std::sqrt(2.0 * th * (th + p.D)), std::sqrt((th + p.D) / (2.0 * th))};
}

/// Non-adiabatic rotated-field terms. Diagnostics only; the solver ignores them.
struct LambdaComponents {
    double lambda0 = 0.0;  ///< scalar part
    double lambda_x = 0.0; ///< Lambda_x at the given L_z eigenvalue
    double lambda_y = 0.0; ///< coefficient of d/dq in Lambda_y
    double lambda_z = 0.0; ///< coefficient of L_z in Lambda_z
};

inline LambdaComponents lambda_components(const ModelParams& p, double q, double lz) {
    if (q == 0.0) throw SingularityError("rotated-field terms diverge as 1/q^2 at q = 0");
    if (!(q > 0.0)) throw DomainError("q must be positive, got " + std::to_string(q));
    const double th = p.theta(q);
    const double th2 = th * th;
    const double d_over_th = p.D / th;
    LambdaComponents c;
    c.lambda0 = 0.25 * (1.0 / (q * q) + p.L * p.L * p.D * p.D / (th2 * th2));
    c.lambda_x = -p.L / (q * th) * (lz - d_over_th * (0.5 - d_over_th * d_over_th));
    c.lambda_y = -p.D * p.L / th2;
    c.lambda_z = -1.0 / (q * q) + p.L * p.L / (th * (th + p.D));
    return c;
}

} // namespace jtent
