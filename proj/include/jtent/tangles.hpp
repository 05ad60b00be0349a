#pragma once

// I-tangles of the qubit (E), angular mode (phi) and radial mode (q).
//
// Everything is a function of the Bloch pair (b_z, b_phi). Two routes are
// provided: closed forms, and a generic route that builds explicit density
// matrices and evaluates Tr(rho rho~) + 2 lambda (1 - Tr rho^2). The two are
// meant to be compared against each other.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <optional>
#include <string>

#include "jtent/errors.hpp"
#include "jtent/observables.hpp"

namespace jtent {

inline void require_physical(const BlochVector& b) {
    if (!std::isfinite(b.b_z) || !std::isfinite(b.b_phi)) throw DomainError("Bloch vector is not finite");
    if (b.length_squared() > 1.0 + 1e-9)
        throw DomainError("Bloch vector outside the unit disk, |b|^2 = " + std::to_string(b.length_squared()));
}

/// Tangle of a pure bipartition from the purity of one marginal.
inline double pure_tangle(double purity) {
    if (!(purity >= 0.0 && purity <= 1.0)) throw DomainError("purity must lie in [0, 1], got " + std::to_string(purity));
    return 2.0 * (1.0 - purity);
}

struct TangleReport {
    double tau_E_phiq = 0.0;
    double tau_phi_Eq = 0.0;
    double tau_q_Ephi = 0.0;
    double tau_Ephi = 0.0;
    double tau_Eq = 0.0;
    double tau_phiq = 0.0;
    double lambda_min_Ephi = -0.5;
    double residual = 0.0;
};

/// Smaller eigenvalue of the nontrivial M block, (1 - sqrt(1 + 8 b_z^2/|b|^2))/4.
inline double lambda_min_closed_form(const BlochVector& b) {
    const double s = b.length_squared();
    if (s == 0.0) throw DegenerateInputError("lambda_min is 0/0 at the origin of the Bloch disk");
    return (1.0 - std::sqrt(1.0 + 8.0 * b.b_z * b.b_z / s)) / 4.0;
}

inline TangleReport closed_form_tangles(const BlochVector& b, double lambda) {
    const double bz2 = b.b_z * b.b_z;
    const double bp2 = b.b_phi * b.b_phi;
    TangleReport r;
    r.tau_E_phiq = 1.0 - bz2;
    r.tau_phi_Eq = r.tau_E_phiq;
    r.tau_q_Ephi = 1.0 - bz2 - bp2;
    r.lambda_min_Ephi = lambda;
    r.tau_Ephi = 0.5 * (1.0 - bz2) * (1.0 + 2.0 * lambda) + 0.5 * bp2 * (1.0 - 2.0 * lambda);
    r.tau_Eq = 0.0;
    r.tau_phiq = 0.0;
    r.residual = 2.0 / 3.0 * r.tau_q_Ephi * (1.0 - lambda);
    return r;
}

inline TangleReport tangle_report(const BlochVector& b) {
    require_physical(b);
    return closed_form_tangles(b, lambda_min_closed_form(b));
}

// ---------------------------------------------------------------------------
// Rank-2 reduced state of E x phi on span{|f1,up>, |f2,down>}

struct RankTwoState {
    double p = 1.0;
    double beta1 = 1.0, beta2 = 0.0;
    double gamma1 = 0.0, gamma2 = 1.0;

    /// rho = p |v1><v1| + (1-p) |v2><v2| with v1 = beta1|f1 up> + beta2|f2 down>,
    /// v2 = gamma1|f1 up> - gamma2|f2 down>.
    static RankTwoState make(double p, double beta1, double beta2, double gamma1, double gamma2) {
        constexpr double tol = 1e-12;
        if (!(p >= 0.0 && p <= 1.0)) throw DomainError("weight p must lie in [0, 1]");
        if (std::abs(beta1 * beta1 + beta2 * beta2 - 1.0) > tol) throw DomainError("beta is not a unit vector");
        if (std::abs(gamma1 * gamma1 + gamma2 * gamma2 - 1.0) > tol) throw DomainError("gamma is not a unit vector");
        if (std::abs(beta1 * gamma1 - beta2 * gamma2) > tol) throw DomainError("v1 and v2 are not orthogonal");
        return RankTwoState{p, beta1, beta2, gamma1, gamma2};
    }

    [[nodiscard]] Eigen::Vector4d v1() const {
        Eigen::Vector4d v = Eigen::Vector4d::Zero();
        v(0) = beta1;
        v(3) = beta2;
        return v;
    }
    [[nodiscard]] Eigen::Vector4d v2() const {
        Eigen::Vector4d v = Eigen::Vector4d::Zero();
        v(0) = gamma1;
        v(3) = -gamma2;
        return v;
    }

    /// 4x4 matrix on E x phi, basis index 2*f + s (f: phi label, s: 0 = up).
    [[nodiscard]] Eigen::Matrix4d density() const {
        const Eigen::Vector4d a = v1(), c = v2();
        return p * a * a.transpose() + (1.0 - p) * c * c.transpose();
    }
};

// The sign of b_phi is a phase on |f2> and drops out of every tangle, so the
// decomposition is built from |b_phi|.
inline RankTwoState rank2_from_bloch(const BlochVector& b) {
    require_physical(b);
    const double r = std::sqrt(b.length_squared());
    if (r == 0.0) throw DegenerateInputError("rank-2 decomposition undefined at the origin");
    const double beta1 = std::sqrt(std::max(0.0, (r + b.b_z) / (2.0 * r)));
    const double beta2 = std::sqrt(std::max(0.0, (r - b.b_z) / (2.0 * r)));
    return RankTwoState{(1.0 + r) / 2.0, beta1, beta2, beta2, beta1};
}

namespace detail {

inline Eigen::Matrix2d trace_phi(const Eigen::Matrix4d& x) { // keeps E
    Eigen::Matrix2d out = Eigen::Matrix2d::Zero();
    for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t)
            for (int f = 0; f < 2; ++f) out(s, t) += x(2 * f + s, 2 * f + t);
    return out;
}

inline Eigen::Matrix2d trace_E(const Eigen::Matrix4d& x) { // keeps phi
    Eigen::Matrix2d out = Eigen::Matrix2d::Zero();
    for (int f = 0; f < 2; ++f)
        for (int g = 0; g < 2; ++g)
            for (int s = 0; s < 2; ++s) out(f, g) += x(2 * f + s, 2 * g + s);
    return out;
}

// A x B in the 2*f + s layout, A acting on phi and B on E.
inline Eigen::Matrix4d kron_phi_E(const Eigen::Matrix2d& on_phi, const Eigen::Matrix2d& on_E) {
    Eigen::Matrix4d out;
    for (int f = 0; f < 2; ++f)
        for (int g = 0; g < 2; ++g)
            for (int s = 0; s < 2; ++s)
                for (int t = 0; t < 2; ++t) out(2 * f + s, 2 * g + t) = on_phi(f, g) * on_E(s, t);
    return out;
}

/// Two-qubit universal inverter S x S applied to an arbitrary operator.
inline Eigen::Matrix4d invert_both(const Eigen::Matrix4d& x) {
    const Eigen::Matrix2d id = Eigen::Matrix2d::Identity();
    return x.trace() * Eigen::Matrix4d::Identity() - kron_phi_E(id, trace_phi(x)) - kron_phi_E(trace_E(x), id) + x;
}

// Tr(rho rho~) = 1 - Tr rho_A^2 - Tr rho_B^2 + Tr rho^2
inline double tr_rho_tilde(double purity_ab, double purity_a, double purity_b) noexcept {
    return 1.0 - purity_a - purity_b + purity_ab;
}

} // namespace detail

/// T_ijkl = Tr(gamma_ij (S x S)(gamma_kl)) with gamma_ij = |v_i><v_j|.
/// Flat index ((i*2 + j)*2 + k)*2 + l, 0-based.
using TTensor = std::array<double, 16>;

inline constexpr std::size_t t_index(int i, int j, int k, int l) noexcept {
    return static_cast<std::size_t>(((i * 2 + j) * 2 + k) * 2 + l);
}

inline TTensor t_tensor(const RankTwoState& st) {
    const std::array<Eigen::Vector4d, 2> v{st.v1(), st.v2()};
    TTensor t{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const Eigen::Matrix4d g_ij = v[i] * v[j].transpose();
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) {
                    const Eigen::Matrix4d g_kl = v[k] * v[l].transpose();
                    t[t_index(i, j, k, l)] = (g_ij * detail::invert_both(g_kl)).trace();
                }
        }
    return t;
}

/// The five independent closed-form entries T1111, T1112, T1122, T1222, T2222.
struct TTensorClosedForm {
    double t1111, t1112, t1122, t1222, t2222;
};

inline TTensorClosedForm t_tensor_closed_form(const RankTwoState& s) noexcept {
    const double b1 = s.beta1, b2 = s.beta2, g1 = s.gamma1, g2 = s.gamma2;
    return TTensorClosedForm{
        4.0 * b1 * b1 * b2 * b2,
        -2.0 * (b1 * b1 * b1 * g1 - b2 * b2 * b2 * g2),
        1.0 - 2.0 * (b1 * b1 * g1 * g1 + b2 * b2 * g2 * g2),
        -2.0 * (b1 * g1 * g1 * g1 - b2 * g2 * g2 * g2),
        4.0 * g1 * g1 * g2 * g2,
    };
}

struct MMatrix {
    Eigen::Matrix3d m;
    Eigen::Vector3d eigenvalues; ///< ascending
    [[nodiscard]] double lambda_min() const noexcept { return eigenvalues(0); }
};

// M33 carries the factor 1/2 that makes the nontrivial block's eigenvalues
// (1 +- sqrt(1 + 8 b_z^2/|b|^2))/4.
inline MMatrix m_matrix(const BlochVector& b) {
    require_physical(b);
    const double s = b.length_squared();
    if (s == 0.0) throw DegenerateInputError("M matrix undefined at the origin");
    MMatrix out;
    out.m = Eigen::Matrix3d::Zero();
    out.m(0, 0) = b.b_z * b.b_z / s;
    out.m(0, 2) = out.m(2, 0) = b.b_z * b.b_phi / s;
    out.m(2, 2) = (b.b_phi * b.b_phi - b.b_z * b.b_z) / (2.0 * s);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(out.m, Eigen::EigenvaluesOnly);
    out.eigenvalues = es.eigenvalues();
    return out;
}

inline constexpr double contract_tolerance = 1e-10;

/// Generic rank-2 I-tangle of E x phi from the explicit 4x4 matrix.
/// lambda defaults to the numeric smallest eigenvalue of the M matrix.
inline double generic_rank2_tangle(const RankTwoState& st, const BlochVector& b, std::optional<double> lambda = {}) {
    const Eigen::Matrix4d rho = st.density();
    const Gram g = overlaps(b);
    // <f1 up|rho|f2 down> = -<b|a> up to the phase on |f2>
    if (std::abs(rho(0, 0) - g.aa) > contract_tolerance || std::abs(rho(3, 3) - g.bb) > contract_tolerance ||
        std::abs(std::abs(rho(0, 3)) - std::abs(g.ab)) > contract_tolerance)
        throw ContractError("rank-2 state does not describe the given Bloch vector");
    const double lam = lambda ? *lambda : m_matrix(b).lambda_min();
    const Eigen::Matrix2d ra = detail::trace_phi(rho), rb = detail::trace_E(rho);
    const double pab = (rho * rho).trace();
    const double tr_tilde = detail::tr_rho_tilde(pab, (ra * ra).trace(), (rb * rb).trace());
    return tr_tilde + 2.0 * lam * (1.0 - pab);
}

// ---------------------------------------------------------------------------
// Explicit pure state of E x phi x q
//
// |psi> = |up>|f1>|a> - |down>|f2>|b>, with |a>, |b> written in a
// two-dimensional orthonormal basis of their span (Cholesky of the Gram
// matrix). Index 4*s + 2*f + k.

using TripartiteState = Eigen::Matrix<double, 8, 1>;

inline TripartiteState tripartite_state(const BlochVector& b) {
    require_physical(b);
    const Gram g = overlaps(b);
    Eigen::Vector2d a = Eigen::Vector2d::Zero(), c = Eigen::Vector2d::Zero();
    if (g.aa > 0.0) {
        a(0) = std::sqrt(g.aa);
        c(0) = g.ab / a(0);
        c(1) = std::sqrt(std::max(0.0, g.bb - c(0) * c(0)));
    } else {
        c(0) = std::sqrt(std::max(0.0, g.bb));
    }
    TripartiteState psi = TripartiteState::Zero();
    for (int k = 0; k < 2; ++k) {
        psi(4 * 0 + 2 * 0 + k) = a(k);
        psi(4 * 1 + 2 * 1 + k) = -c(k);
    }
    return psi;
}

enum class Party { E = 0, phi = 1, q = 2 };

/// Reduced density matrix of one party.
inline Eigen::Matrix2d reduce_one(const TripartiteState& psi, Party keep) {
    const int shift = 2 - static_cast<int>(keep);
    Eigen::Matrix2d out = Eigen::Matrix2d::Zero();
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            const int ki = (i >> shift) & 1, kj = (j >> shift) & 1;
            if ((i & ~(1 << shift)) == (j & ~(1 << shift))) out(ki, kj) += psi(i) * psi(j);
        }
    return out;
}

/// Reduced density matrix of two parties, layout 2 * first + second.
inline Eigen::Matrix4d reduce_pair(const TripartiteState& psi, Party first, Party second) {
    const int traced = 3 - static_cast<int>(first) - static_cast<int>(second);
    auto bit = [](int idx, int party) { return (idx >> (2 - party)) & 1; };
    Eigen::Matrix4d out = Eigen::Matrix4d::Zero();
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            if (bit(i, traced) != bit(j, traced)) continue;
            const int r = 2 * bit(i, static_cast<int>(first)) + bit(i, static_cast<int>(second));
            const int c = 2 * bit(j, static_cast<int>(first)) + bit(j, static_cast<int>(second));
            out(r, c) += psi(i) * psi(j);
        }
    return out;
}

inline double purity(const Eigen::Matrix2d& r) { return (r * r).trace(); }
inline double purity(const Eigen::Matrix4d& r) { return (r * r).trace(); }

/// lambda_min for the E x q (and phi x q) rank-2 marginals.
inline double lambda_min_qpair(const BlochVector& b) noexcept {
    const double den = 1.0 - b.b_z * b.b_z;
    if (den == 0.0) return -0.5; // the tangle's coefficient vanishes here
    return -(1.0 - b.b_z * b.b_z - b.b_phi * b.b_phi) / (2.0 * den);
}

/// Generic tangle of a two-party marginal of |psi>, given its lambda.
inline double generic_pair_tangle(const TripartiteState& psi, Party first, Party second, double lambda) {
    const Eigen::Matrix4d rho = reduce_pair(psi, first, second);
    const double pab = purity(rho);
    const double tr_tilde = detail::tr_rho_tilde(pab, purity(reduce_one(psi, first)), purity(reduce_one(psi, second)));
    return tr_tilde + 2.0 * lambda * (1.0 - pab);
}

/// Every entry of the report recomputed from explicit density matrices.
inline TangleReport generic_report(const BlochVector& b) {
    const TripartiteState psi = tripartite_state(b);
    TangleReport r;
    r.tau_E_phiq = pure_tangle(purity(reduce_one(psi, Party::E)));
    r.tau_phi_Eq = pure_tangle(purity(reduce_one(psi, Party::phi)));
    r.tau_q_Ephi = pure_tangle(purity(reduce_one(psi, Party::q)));
    r.lambda_min_Ephi = m_matrix(b).lambda_min();
    r.tau_Ephi = generic_pair_tangle(psi, Party::E, Party::phi, r.lambda_min_Ephi);
    const double lq = lambda_min_qpair(b);
    r.tau_Eq = generic_pair_tangle(psi, Party::E, Party::q, lq);
    r.tau_phiq = generic_pair_tangle(psi, Party::phi, Party::q, lq);
    const double avg = ((r.tau_E_phiq - r.tau_Ephi - r.tau_Eq) + (r.tau_phi_Eq - r.tau_Ephi - r.tau_phiq) +
                        (r.tau_q_Ephi - r.tau_Eq - r.tau_phiq)) /
                       3.0;
    r.residual = avg;
    return r;
}

inline constexpr double monogamy_tolerance = 1e-12;

/// Mean of the three monogamy deficits, cross-checked against the closed
/// form (2/3) tau_q(E phi) (1 - lambda_min).
inline double residual_average(const TangleReport& r) {
    const double d1 = r.tau_E_phiq - r.tau_Ephi - r.tau_Eq;
    const double d2 = r.tau_phi_Eq - r.tau_Ephi - r.tau_phiq;
    const double d3 = r.tau_q_Ephi - r.tau_Eq - r.tau_phiq;
    if (d1 < -monogamy_tolerance || d2 < -monogamy_tolerance || d3 < -monogamy_tolerance)
        throw ContractError("monogamy violated: deficits " + std::to_string(d1) + ", " + std::to_string(d2) + ", " +
                            std::to_string(d3));
    const double avg = (d1 + d2 + d3) / 3.0;
    const double closed = 2.0 / 3.0 * r.tau_q_Ephi * (1.0 - r.lambda_min_Ephi);
    if (std::abs(avg - closed) > monogamy_tolerance)
        throw ContractError("residual average " + std::to_string(avg) + " differs from closed form " +
                            std::to_string(closed));
    return avg;
}

} // namespace jtent
