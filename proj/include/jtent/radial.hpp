#pragma once

// Ground state of the two-dimensional radial problem
//
//     [-d^2/dq^2 - (1/q) d/dq + V(q)] phi = eps phi     (zero centrifugal term)
//
// on a half-offset grid q_i = (i + 1/2) h with a hard wall just past q_max.
//
// The operator is discretized in flux form, -(1/q)(q phi')', which is
// self-adjoint in the weight q dq. Scaling u_i = sqrt(h q_i) phi_i turns it
// into a symmetric tridiagonal matrix; the face at q = 0 has zero area, so
// the origin needs no special treatment and the scheme stays second order.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "jtent/errors.hpp"
#include "jtent/model.hpp"
#include "jtent/tridiagonal.hpp"

namespace jtent {

template <class F>
concept RadialPotential = std::regular_invocable<const F&, double> &&
                          std::convertible_to<std::invoke_result_t<const F&, double>, double>;

class RadialGrid {
public:
    static constexpr std::size_t min_points = 64;

    RadialGrid(double q_max, std::size_t n) : q_max_(q_max), n_(n) {
        if (!(q_max > 0.0) || !std::isfinite(q_max)) throw DomainError("grid q_max must be positive");
        if (n < min_points) throw DomainError("grid needs at least 64 points, got " + std::to_string(n));
    }

    [[nodiscard]] double q_max() const noexcept { return q_max_; }
    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] double spacing() const noexcept { return q_max_ / static_cast<double>(n_); }
    [[nodiscard]] double node(std::size_t i) const noexcept {
        return (static_cast<double>(i) + 0.5) * spacing();
    }
    /// Cell face between node i-1 and node i (face(0) = 0).
    [[nodiscard]] double face(std::size_t i) const noexcept { return static_cast<double>(i) * spacing(); }

private:
    double q_max_;
    std::size_t n_;
};

struct RadialState {
    RadialGrid grid;
    std::vector<double> phi; ///< phi(q_i), positive, normalized with weight q dq
    double energy = 0.0;     ///< units of omega/2
    double j = -0.5;
    std::size_t refinements = 0; ///< grid doublings performed by refine_*
    double last_change = std::numeric_limits<double>::quiet_NaN();

    /// Midpoint quadrature weight h q_i phi_i^2.
    [[nodiscard]] double weight(std::size_t i) const noexcept {
        return grid.spacing() * grid.node(i) * phi[i] * phi[i];
    }

    /// Midpoint-rule integral of q phi^2 f(q).
    template <class F>
    [[nodiscard]] double integrate(F&& f) const {
        double s = 0.0;
        for (std::size_t i = 0; i < phi.size(); ++i) s += weight(i) * f(grid.node(i));
        return s;
    }

    [[nodiscard]] double norm() const {
        return integrate([](double) { return 1.0; });
    }
};

/// Symmetric tridiagonal matrix of the radial operator in u-variables.
template <RadialPotential V>
SymTridiagonal radial_operator(const V& potential, const RadialGrid& grid) {
    const std::size_t n = grid.size();
    const double h = grid.spacing();
    const double h2 = h * h;
    SymTridiagonal t;
    t.diag.resize(n);
    t.off.resize(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double q = grid.node(i);
        t.diag[i] = (grid.face(i) + grid.face(i + 1)) / (q * h2) + static_cast<double>(potential(q));
        if (i + 1 < n) t.off[i] = -grid.face(i + 1) / (h2 * std::sqrt(q * grid.node(i + 1)));
    }
    return t;
}

/// Discrete energy functional divided by the norm, in sum-of-squares form.
/// Free of the O(1/h^2) cancellation of a plain u^T T u.
template <RadialPotential V>
double rayleigh_quotient(const V& potential, const RadialGrid& grid, std::span<const double> phi) {
    const std::size_t n = grid.size();
    const double h = grid.spacing();
    double kinetic = 0.0, pot = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double q = grid.node(i);
        const double next = i + 1 < n ? phi[i + 1] : 0.0;
        const double d = next - phi[i];
        kinetic += grid.face(i + 1) / h * d * d;
        const double w = h * q * phi[i] * phi[i];
        pot += w * static_cast<double>(potential(q));
        norm += w;
    }
    return (kinetic + pot) / norm;
}

/// Tail of the ground state must be below this fraction of its peak.
inline constexpr double cutoff_tolerance = 1e-6;

template <RadialPotential V>
RadialState solve_radial(const V& potential, const RadialGrid& grid, std::optional<double> hint = std::nullopt) {
    const SymTridiagonal t = radial_operator(potential, grid);
    Eigenpair ep = lowest_eigenpair(t, hint);

    const std::size_t n = grid.size();
    const double h = grid.spacing();
    RadialState state{grid, std::vector<double>(n), 0.0};
    // ||u|| = 1  <=>  sum h q_i phi_i^2 = 1
    double peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        state.phi[i] = ep.vector[i] / std::sqrt(h * grid.node(i));
        peak = std::max(peak, state.phi[i]);
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!(state.phi[i] > 0.0))
            throw SolverError("ground state has a non-positive sample at q = " + std::to_string(grid.node(i)));
    if (!(state.phi[n - 1] < cutoff_tolerance * peak))
        throw CutoffError("wavefunction tail " + std::to_string(state.phi[n - 1] / peak) + " of peak at q_max = " +
                          std::to_string(grid.q_max()));
    state.energy = rayleigh_quotient(potential, grid, state.phi);
    return state;
}

/// Frequency renormalization of the lower sheet around its minimum:
/// sqrt(1 - alpha) below the bifurcation, sqrt(1 - 1/alpha^2) above.
inline double curvature_scale(const ModelParams& p) noexcept {
    if (p.alpha < 1.0) return std::sqrt(1.0 - p.alpha);
    return std::sqrt(1.0 - 1.0 / (p.alpha * p.alpha));
}

inline RadialGrid default_physical_grid(const ModelParams& p, std::size_t n = 4096) {
    const double q0 = apes_minimum(p).q0;
    const double kappa = std::max(curvature_scale(p), 0.1);
    return RadialGrid(std::max(8.0, q0 + 8.0 / std::sqrt(kappa)), n);
}

inline RadialGrid default_scaled_grid(double zeta, std::size_t n = 4096) {
    const double x0 = std::sqrt(std::max(0.0, -zeta / 2.0));
    return RadialGrid(std::max(6.0, x0 + 6.0), n);
}

/// Lower adiabatic sheet as a callable potential.
struct LowerSurface {
    ModelParams params;
    double operator()(double q) const noexcept { return lower_surface(params, q); }
};

/// Quartic expansion of the lower sheet.
struct QuarticSurface {
    ModelParams params;
    double operator()(double q) const noexcept { return quartic_surface(params, q); }
};

/// Symanzik-scaled potential zeta x^2 + x^4.
struct ScaledQuartic {
    double zeta = 0.0;
    double operator()(double x) const noexcept { return x * x * (zeta + x * x); }
};

inline RadialState solve_physical(const ModelParams& p, const RadialGrid& grid) {
    return solve_radial(LowerSurface{p}, grid);
}

inline RadialState solve_scaled(double zeta, const RadialGrid& grid) { return solve_radial(ScaledQuartic{zeta}, grid); }

inline constexpr std::size_t max_grid_points = std::size_t{1} << 20;

/// Doubles n until consecutive energies differ by less than tol. When the
/// tail check fails, q_max grows by half at fixed spacing and the sequence
/// restarts.
template <RadialPotential V>
RadialState refine_radial(const V& potential, RadialGrid grid, double tol, std::size_t n_max = max_grid_points) {
    if (!(tol >= 1e-12)) throw DomainError("refinement tolerance must be >= 1e-12");
    std::optional<double> previous;
    std::size_t doublings = 0;
    while (true) {
        if (grid.size() > n_max)
            throw ConvergenceError("grid budget of " + std::to_string(n_max) + " points exceeded before |d eps| < " +
                                   std::to_string(tol));
        std::optional<RadialState> state;
        try {
            state = solve_radial(potential, grid, previous);
        } catch (const CutoffError&) {
            const double h = grid.spacing();
            const double q_max = 1.5 * grid.q_max();
            grid = RadialGrid(q_max, static_cast<std::size_t>(std::ceil(q_max / h)));
            previous.reset();
            continue;
        }
        if (previous) {
            const double change = std::abs(state->energy - *previous);
            if (change < tol) {
                state->refinements = doublings;
                state->last_change = change;
                return std::move(*state);
            }
        }
        previous = state->energy;
        grid = RadialGrid(grid.q_max(), grid.size() * 2);
        ++doublings;
    }
}

inline RadialState refine_until(const ModelParams& p, double tol, std::size_t n_initial = 4096) {
    return refine_radial(LowerSurface{p}, default_physical_grid(p, n_initial), tol);
}

inline RadialState refine_scaled(double zeta, double tol, std::size_t n_initial = 4096) {
    return refine_radial(ScaledQuartic{zeta}, default_scaled_grid(zeta, n_initial), tol);
}

/// Independent ground-energy oracle: Numerov shooting in t = ln q, where the
/// radial equation reads phi_tt = q^2 (V - eps) phi with no first-derivative
/// term. Bisection on the node count of phi over (0, q_max] with phi(q_max)
/// = 0. Uses 8 * grid.size() logarithmic steps from q_max * 1e-6.
template <RadialPotential V>
double numerov_oracle(const V& potential, const RadialGrid& grid) {
    const double q_max = grid.q_max();
    const double q_min = 1e-6 * q_max;
    const std::size_t steps = 8 * grid.size();
    const double t0 = std::log(q_min);
    const double dt = (std::log(q_max) - t0) / static_cast<double>(steps);
    const double c = dt * dt / 12.0;

    std::vector<double> q2(steps + 1), v(steps + 1);
    double v_min = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k <= steps; ++k) {
        const double q = k == steps ? q_max : std::exp(t0 + dt * static_cast<double>(k));
        q2[k] = q * q;
        v[k] = static_cast<double>(potential(q));
        v_min = std::min(v_min, v[k]);
    }

    auto nodes = [&](double eps) {
        // phi = 1 + (V(0) - eps) q^2 / 4 + O(q^4) near the origin
        double prev = 1.0 + (v[0] - eps) * q2[0] / 4.0;
        double cur = 1.0 + (v[1] - eps) * q2[1] / 4.0;
        double g_prev = q2[0] * (v[0] - eps);
        double g_cur = q2[1] * (v[1] - eps);
        int count = (prev > 0.0) != (cur > 0.0) ? 1 : 0;
        for (std::size_t k = 1; k < steps; ++k) {
            const double g_next = q2[k + 1] * (v[k + 1] - eps);
            double next = (2.0 * cur * (1.0 + 5.0 * c * g_cur) - prev * (1.0 - c * g_prev)) / (1.0 - c * g_next);
            if (next == 0.0) next = -std::numeric_limits<double>::min();
            if ((next > 0.0) != (cur > 0.0)) ++count;
            if (std::abs(next) > 1e200) {
                next *= 1e-200;
                cur *= 1e-200;
            }
            prev = cur;
            cur = next;
            g_prev = g_cur;
            g_cur = g_next;
        }
        return count;
    };

    double lo = v_min;
    if (nodes(lo) != 0) throw OracleError("solution has nodes below the potential minimum");
    double step = 1.0;
    double hi = lo + step;
    int expansions = 0;
    while (nodes(hi) == 0) {
        if (++expansions > 80) throw OracleError("could not bracket the ground state from above");
        step *= 2.0;
        hi = lo + step;
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (nodes(mid) == 0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Two-column CSV (q, phi) with 17 significant digits.
inline void write_wavefunction_csv(std::ostream& os, const RadialState& state) {
    os << "q,phi\n";
    char buf[64];
    for (std::size_t i = 0; i < state.phi.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", state.grid.node(i), state.phi[i]);
        os << buf;
    }
}

} // namespace jtent
