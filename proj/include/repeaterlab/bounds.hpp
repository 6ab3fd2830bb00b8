#pragma once

/**
 * @file
 * Upper bound on the probability that one outcome of Clare's general
 * measurement leaves Alice and Bob maximally entangled, for Schmidt-form
 * pairs sum_k sqrt(a_k)|kk> and sum_k sqrt(b_k)|kk> with d_A <= d_B = d:
 *
 *   p_i <= d / sum_{k=1}^{d_A} 1 / (a_k b_{d_A+1-k}) = p_max.
 *
 * The largest a is paired with the smallest b, which minimises
 * tr(U rho_B^{-1} U^dagger rho_A^{-1}) over unitaries U.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "qmath.hpp"
#include "states.hpp"

namespace repeaterlab {

/// 1 / ||rho^{-1/2} rho_i rho^{-1/2}||: the largest weight rho_i can carry in an ensemble for rho.
inline double steering_bound(const ComplexMatrix &rho, const ComplexMatrix &rho_i,
                             double cutoff = tol::support_cutoff) {
    require_hermitian(rho, "steering_bound");
    require_hermitian(rho_i, "steering_bound");
    detail::require(rho.rows() == rho_i.rows(), ErrorCode::dimension_mismatch, "steering_bound: dimensions differ");
    const std::size_t n = rho.rows();
    const ComplexMatrix outside = ComplexMatrix::identity(n) - support_projector(rho, cutoff);
    detail::require((outside * rho_i * outside).max_abs() <= 1e-10, ErrorCode::support_violation,
                    "steering_bound: rho_i is not supported inside rho (the bound would be 0)");
    const ComplexMatrix inv = pinv_sqrt(rho, cutoff);
    ComplexMatrix x = inv * rho_i * inv;
    x = 0.5 * (x + x.adjoint());
    const double norm = op_norm_inf(x);
    detail::require(norm > 0.0, ErrorCode::dimension_mismatch, "steering_bound: rho_i vanishes");
    return 1.0 / norm;
}

/// lambda_up(A)^T lambda_down(B), a lower bound on tr(AB).
inline double trace_rearrangement_lb(const ComplexMatrix &a, const ComplexMatrix &b) {
    require_hermitian(a, "trace_rearrangement_lb");
    require_hermitian(b, "trace_rearrangement_lb");
    detail::require(a.rows() == b.rows(), ErrorCode::dimension_mismatch, "trace_rearrangement_lb: dimensions differ");
    const auto up = eigh(a).ascending();
    const auto down = eigh(b).descending();
    double s = 0.0;
    for (std::size_t k = 0; k < up.size(); ++k) {
        s += up[k] * down[k];
    }
    return s;
}

namespace detail {
// Orders the pair so the first state has the smaller Schmidt rank.
inline std::pair<const SchmidtState &, const SchmidtState &> ordered(const SchmidtState &a, const SchmidtState &b) {
    if (a.dim() <= b.dim()) {
        return {a, b};
    }
    return {b, a};
}
} // namespace detail

inline double p_max(const SchmidtState &a_in, const SchmidtState &b_in) {
    const auto [a, b] = detail::ordered(a_in, b_in);
    const std::size_t da = a.dim();
    double sum = 0.0;
    for (std::size_t k = 0; k < da; ++k) {
        sum += 1.0 / (a[k] * b[da - 1 - k]);
    }
    return static_cast<double>(b.dim()) / sum;
}

/// Reversal of the first d_A basis states, identity on the rest.
inline ComplexMatrix optimal_u(std::size_t dim_a, std::size_t d) {
    detail::require(dim_a >= 1 && d >= dim_a, ErrorCode::dimension_mismatch, "optimal_u: requires d >= dA >= 1");
    ComplexMatrix u(d, d);
    for (std::size_t k = 0; k < dim_a; ++k) {
        u(dim_a - 1 - k, k) = 1.0;
    }
    for (std::size_t k = dim_a; k < d; ++k) {
        u(k, k) = 1.0;
    }
    return u;
}

struct BoundResult {
    double p_max = 0.0;
    ComplexMatrix optimal_u;
    ComplexMatrix m_i; ///< acts on Clare's register (C1 (x) C2), d^2 x d^2
    double max_eigenvalue = 0.0; ///< of m_i^dagger m_i; <= 1 for a valid measurement element
    double achieved_p = 0.0;
    double post_fidelity = 0.0; ///< <Omega_U| rho_AB_post |Omega_U>
};

/**
 * Builds M_i = sqrt(p_max) |Omega_U><Omega_U| rho_AB^{-1/2} and applies it to
 * Clare's register of the joint state. Alice's system is zero-padded to
 * dimension d; when d_A < d_B the outcome can only reach a d_A-dimensional
 * subspace, so achieved_p = p_max * d_A / d and post_fidelity = d_A / d.
 */
inline BoundResult achieving_operator(const SchmidtState &a_in, const SchmidtState &b_in) {
    const auto [a, b] = detail::ordered(a_in, b_in);
    const std::size_t da = a.dim();
    const std::size_t d = b.dim();

    BoundResult r;
    r.p_max = p_max(a, b);
    r.optimal_u = optimal_u(da, d);

    std::vector<double> a_pad(d, 0.0);
    std::copy(a.probabilities().begin(), a.probabilities().end(), a_pad.begin());
    const ComplexMatrix rho_ab =
        tensor(ComplexMatrix::diagonal(std::span<const double>(a_pad)), ComplexMatrix::diagonal(std::span<const double>(b.probabilities())));
    const Ket omega = max_entangled(r.optimal_u, d);
    r.m_i = std::sqrt(r.p_max) * (omega.projector() * pinv_sqrt(rho_ab));

    ComplexMatrix mtm = r.m_i.adjoint() * r.m_i;
    mtm = 0.5 * (mtm + mtm.adjoint());
    r.max_eigenvalue = eigh(mtm).eigenvalues.back();
    detail::require(r.max_eigenvalue <= 1.0 + 1e-10, ErrorCode::operator_inequality,
                    "achieving_operator: M^dagger M exceeds identity by " + std::to_string(r.max_eigenvalue - 1.0));

    // Wires: A, C1, C2, B, each padded to dimension d.
    const std::array<std::size_t, 4> dims{d, d, d, d};
    Ket left(d * d);
    for (std::size_t k = 0; k < da; ++k) {
        left[k * d + k] = std::sqrt(a[k]);
    }
    Ket right(d * d);
    for (std::size_t k = 0; k < d; ++k) {
        right[k * d + k] = std::sqrt(b[k]);
    }
    const Ket joint = tensor(left, right);
    const Ket out = apply_local(r.m_i, joint, dims, 1, 2);
    r.achieved_p = out.norm_squared();
    if (r.achieved_p > 0.0) {
        const std::array<std::size_t, 2> keep{0, 3};
        const ComplexMatrix rho_post = reduced_density(out, dims, keep);
        r.post_fidelity = std::clamp(inner(omega, rho_post * omega).real() / r.achieved_p, 0.0, 1.0);
    }
    return r;
}

} // namespace repeaterlab
