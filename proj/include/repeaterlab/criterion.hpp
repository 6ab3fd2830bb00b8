#pragma once

/**
 * @file
 * Optimality test for Clare's rank-1 projective measurements.
 *
 * With theta <= eta, a basis {P_k} reaches the optimal rate 2 sin^2 theta iff
 *
 *   sum_k sqrt( tr(T1 (x) T2 P_k)^2 + sin^2(2 theta) |tr(|0><1| (x) T2 P_k)|^2 ) = cos 2 theta,
 *
 * T1 = diag(cos^2 theta, -sin^2 theta), T2 = diag(cos^2 eta, sin^2 eta).
 * The achieved rate satisfies p_s = 1 - lhs for every rank-1 basis, and
 * `achieved_rate` computes p_s independently from reduced density matrices.
 */

#include <cmath>
#include <utility>

#include "qmath.hpp"
#include "repeater.hpp"
#include "states.hpp"

namespace repeaterlab {

struct TOperators {
    ComplexMatrix t1;
    ComplexMatrix t2;
};

inline TOperators t_operators(double theta, double eta) {
    check_angle(theta, AngleRange::strict, "theta");
    check_angle(eta, AngleRange::strict, "eta");
    detail::require(theta <= eta, ErrorCode::angle_out_of_range, "t_operators: requires theta <= eta");
    const double ct = std::cos(theta), st = std::sin(theta);
    const double ce = std::cos(eta), se = std::sin(eta);
    return {ComplexMatrix::diagonal({ct * ct, -st * st}), ComplexMatrix::diagonal({ce * ce, se * se})};
}

namespace detail {

inline void require_rank_one_clare(const ProjectiveMeasurement &meas) {
    require(meas.dim() == 4 && meas.size() == 4, ErrorCode::dimension_mismatch,
            "criterion: expects four projectors on Clare's two qubits");
    require(meas.rank_one(), ErrorCode::rank_not_one, "criterion: every projector must have rank 1");
}

} // namespace detail

inline double criterion_lhs(const ProjectiveMeasurement &meas, double theta, double eta) {
    detail::require_rank_one_clare(meas);
    // The criterion is stated for theta <= eta; mirror the scenario (swap the pairs and
    // Clare's qubits) otherwise.
    if (theta > eta) {
        return criterion_lhs(meas.swapped_qubits(), eta, theta);
    }
    const auto t = t_operators(theta, eta);
    const ComplexMatrix t12 = tensor(t.t1, t.t2);
    ComplexMatrix flip(2, 2);
    flip(0, 1) = 1.0;
    const ComplexMatrix coherence = tensor(flip, t.t2);
    const double s2t = std::sin(2.0 * theta);
    double lhs = 0.0;
    for (const auto &p : meas.projectors()) {
        const double diag = (t12 * p).trace().real();
        const double off = std::abs((coherence * p).trace());
        lhs += std::sqrt(diag * diag + s2t * s2t * off * off);
    }
    return lhs;
}

/// Twice the smallest eigenvalue of Alice's reduced state.
inline double concentration_from_reduced(const Ket &two_qubit) {
    const std::array<std::size_t, 2> dims{2, 2};
    const std::array<std::size_t, 1> keep{0};
    const auto rho_a = partial_trace(two_qubit.projector(), dims, keep);
    const auto es = eigh(rho_a);
    return std::min(1.0, 2.0 * std::max(0.0, es.eigenvalues.front()));
}

/// sum_k p_k * P_E(post_k), evaluated from the joint state.
inline double achieved_rate(const ProjectiveMeasurement &meas, double theta, double eta) {
    detail::require_rank_one_clare(meas);
    const auto branches = swap_branches(make_joint(theta, eta), meas);
    double rate = 0.0;
    for (const auto &b : branches) {
        if (b.post_state) {
            rate += b.probability * concentration_from_reduced(*b.post_state);
        }
    }
    return rate;
}

struct CriterionReport {
    double lhs = 0.0;
    double rhs = 0.0; ///< cos 2 min(theta, eta)
    double p_s = 0.0;
    double optimal_rate = 0.0; ///< 2 sin^2 min(theta, eta)
    bool optimal = false;
    bool rate_route_optimal = false;
    double tolerance = 0.0;
};

inline CriterionReport is_optimal(const ProjectiveMeasurement &meas, double theta, double eta,
                                  double tolerance = 1e-9) {
    CriterionReport r;
    const double smaller = std::min(theta, eta);
    r.lhs = criterion_lhs(meas, theta, eta);
    r.rhs = std::cos(2.0 * smaller);
    r.p_s = achieved_rate(meas, theta, eta);
    r.optimal_rate = 2.0 * std::sin(smaller) * std::sin(smaller);
    r.tolerance = tolerance;
    r.optimal = std::abs(r.lhs - r.rhs) <= tolerance;
    r.rate_route_optimal = std::abs(r.p_s - r.optimal_rate) <= tolerance;
    return r;
}

} // namespace repeaterlab
