#pragma once

// Lowest eigenpair of a real symmetric tridiagonal matrix:
// Sturm-sequence bisection for the eigenvalue, then shifted inverse
// iteration for the eigenvector.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jtent/errors.hpp"

namespace jtent {

struct SymTridiagonal {
    std::vector<double> diag; ///< size n
    std::vector<double> off;  ///< size n-1, off[i] couples i and i+1

    [[nodiscard]] std::size_t size() const noexcept { return diag.size(); }

    /// Gershgorin interval containing the whole spectrum.
    [[nodiscard]] std::pair<double, double> gershgorin() const noexcept {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        const std::size_t n = diag.size();
        for (std::size_t i = 0; i < n; ++i) {
            double r = 0.0;
            if (i > 0) r += std::abs(off[i - 1]);
            if (i + 1 < n) r += std::abs(off[i]);
            lo = std::min(lo, diag[i] - r);
            hi = std::max(hi, diag[i] + r);
        }
        return {lo, hi};
    }

    [[nodiscard]] double norm_inf() const noexcept {
        auto [lo, hi] = gershgorin();
        return std::max(std::abs(lo), std::abs(hi));
    }

    /// y = T x
    void apply(std::span<const double> x, std::span<double> y) const noexcept {
        const std::size_t n = diag.size();
        for (std::size_t i = 0; i < n; ++i) {
            double s = diag[i] * x[i];
            if (i > 0) s += off[i - 1] * x[i - 1];
            if (i + 1 < n) s += off[i] * x[i + 1];
            y[i] = s;
        }
    }
};

/// Number of eigenvalues strictly below x.
inline std::size_t sturm_count(const SymTridiagonal& t, double x) noexcept {
    const std::size_t n = t.size();
    const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
    std::size_t count = 0;
    double d = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double b2 = i > 0 ? t.off[i - 1] * t.off[i - 1] : 0.0;
        d = (t.diag[i] - x) - (i > 0 ? b2 / d : 0.0);
        if (d == 0.0) d = -tiny;
        if (d < 0.0) ++count;
    }
    return count;
}

struct Eigenpair {
    double value = 0.0;         ///< bisection estimate of the smallest eigenvalue
    std::vector<double> vector; ///< unit 2-norm, sign chosen so the sum is positive
    double residual = 0.0;      ///< ||T v - mu v||_2 with mu the Rayleigh quotient
    int inverse_iterations = 0;
};

namespace detail {

// Solves (T - sigma I) x = rhs in place by LDL^T elimination. The caller
// guarantees T - sigma I is positive definite.
inline void solve_shifted(const SymTridiagonal& t, double sigma, std::vector<double>& rhs,
                          std::vector<double>& work) {
    const std::size_t n = t.size();
    work.resize(n);
    double d = t.diag[0] - sigma;
    work[0] = d;
    for (std::size_t i = 1; i < n; ++i) {
        const double l = t.off[i - 1] / d;
        d = (t.diag[i] - sigma) - l * t.off[i - 1];
        work[i] = d;
        rhs[i] -= l * rhs[i - 1];
    }
    rhs[n - 1] /= work[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - t.off[i] * rhs[i + 1]) / work[i];
}

inline double normalize(std::vector<double>& v) noexcept {
    double s = 0.0;
    for (double x : v) s += x * x;
    s = std::sqrt(s);
    for (double& x : v) x /= s;
    return s;
}

} // namespace detail

/// Smallest eigenpair. `hint`, if given, is a guess for the eigenvalue used
/// to seed a narrow bisection bracket; a wrong hint only costs time.
inline Eigenpair lowest_eigenpair(const SymTridiagonal& t, std::optional<double> hint = std::nullopt) {
    const std::size_t n = t.size();
    if (n == 0) throw SolverError("empty matrix");
    if (t.off.size() + 1 != n) throw SolverError("off-diagonal length mismatch");

    const double eps = std::numeric_limits<double>::epsilon();
    auto [lo, hi] = t.gershgorin();
    const double scale = std::max({std::abs(lo), std::abs(hi), 1.0});

    if (hint && std::isfinite(*hint)) {
        const double w = 1e-3 * std::max(1.0, std::abs(*hint));
        const double a = *hint - w, b = *hint + w;
        if (a > lo && sturm_count(t, a) == 0 && b < hi && sturm_count(t, b) >= 1) {
            lo = a;
            hi = b;
        }
    }
    if (sturm_count(t, hi) == 0) hi += eps * scale * 4.0;

    for (int it = 0; it < 256; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (hi - lo <= 2.0 * eps * std::max(std::abs(lo), std::abs(hi))) break;
        if (sturm_count(t, mid) >= 1)
            hi = mid;
        else
            lo = mid;
    }

    Eigenpair out;
    out.value = 0.5 * (lo + hi);

    // Shift strictly below the spectrum so T - sigma I is positive definite.
    double delta = std::max(1e-8 * std::max(1.0, std::abs(lo)), 64.0 * eps * scale);
    double sigma = lo - delta;
    for (int k = 0; k < 64 && sturm_count(t, sigma) != 0; ++k) {
        delta *= 8.0;
        sigma = lo - delta;
    }
    if (sturm_count(t, sigma) != 0) throw SolverError("could not place shift below the spectrum");

    std::vector<double> v(n, 1.0), prev, work, tv(n);
    detail::normalize(v);
    int it = 0;
    for (; it < 12; ++it) {
        prev = v;
        detail::solve_shifted(t, sigma, v, work);
        const double s = detail::normalize(v);
        if (!std::isfinite(s)) throw SolverError("inverse iteration overflow");
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) change = std::max(change, std::abs(v[i] - prev[i]));
        if (change < 1e-14 && it >= 1) {
            ++it;
            break;
        }
    }
    out.inverse_iterations = it;

    double sum = 0.0;
    for (double x : v) sum += x;
    if (sum < 0.0)
        for (double& x : v) x = -x;

    t.apply(v, tv);
    double mu = 0.0;
    for (std::size_t i = 0; i < n; ++i) mu += v[i] * tv[i];
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) r2 += (tv[i] - mu * v[i]) * (tv[i] - mu * v[i]);
    out.residual = std::sqrt(r2);
    if (!(out.residual <= 1e-9 * scale))
        throw SolverError("inverse iteration did not converge, residual " + std::to_string(out.residual));

    out.vector = std::move(v);
    return out;
}

} // namespace jtent
