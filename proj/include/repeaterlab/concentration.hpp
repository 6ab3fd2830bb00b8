#pragma once

// Single-copy entanglement concentration of a two-qubit pure state (Procrustean filtering).

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "qmath.hpp"
#include "random.hpp"
#include "states.hpp"

namespace repeaterlab {

/// Measurement operators {M_i} with sum M_i^dagger M_i = I.
struct GeneralMeasurement {
    std::vector<ComplexMatrix> operators;

    [[nodiscard]] std::size_t dim() const { return operators.empty() ? 0 : operators.front().cols(); }

    /// max |sum M_i^dagger M_i - I|
    [[nodiscard]] double completeness_error() const {
        detail::require(!operators.empty(), ErrorCode::incomplete_measurement, "measurement has no operators");
        ComplexMatrix sum(dim(), dim());
        for (const auto &m : operators) {
            detail::require(m.cols() == dim() && m.rows() == dim(), ErrorCode::dimension_mismatch,
                            "measurement operators must share one square shape");
            sum += m.adjoint() * m;
        }
        return max_abs_diff(sum, ComplexMatrix::identity(dim()));
    }

    [[nodiscard]] bool is_complete(double tolerance = 1e-10) const { return completeness_error() <= tolerance; }
};

struct MeasurementBranch {
    double probability = 0.0;
    std::optional<Ket> state; ///< normalized post-measurement state; empty when probability is 0
};

/// Born-rule branches of `m` applied to `wire` of a multi-party ket.
inline std::vector<MeasurementBranch> apply_measurement(const GeneralMeasurement &m, const Ket &psi,
                                                        std::span<const std::size_t> dims, std::size_t wire) {
    detail::require(m.is_complete(), ErrorCode::incomplete_measurement,
                    "apply_measurement: operators do not satisfy sum M^dagger M = I");
    detail::require(wire < dims.size() && dims[wire] == m.dim(), ErrorCode::dimension_mismatch,
                    "apply_measurement: wire does not match the measurement dimension");
    std::vector<MeasurementBranch> out;
    out.reserve(m.operators.size());
    for (const auto &op : m.operators) {
        Ket post = apply_local(op, psi, dims, wire);
        MeasurementBranch b;
        b.probability = post.norm_squared();
        if (b.probability > 1e-300) {
            b.state = post.normalized();
        }
        out.push_back(std::move(b));
    }
    return out;
}

/// Convenience overload: every wire has the measurement's dimension.
inline std::vector<MeasurementBranch> apply_measurement(const GeneralMeasurement &m, const Ket &psi,
                                                        std::size_t wire) {
    const std::size_t d = m.dim();
    detail::require(d >= 2, ErrorCode::dimension_mismatch, "apply_measurement: measurement dimension < 2");
    std::vector<std::size_t> dims;
    std::size_t total = 1;
    while (total < psi.dim()) {
        total *= d;
        dims.push_back(d);
    }
    detail::require(total == psi.dim(), ErrorCode::dimension_mismatch,
                    "apply_measurement: ket dimension is not a power of the measurement dimension");
    return apply_measurement(m, psi, dims, wire);
}

/// Samples an outcome index from Born-rule probabilities.
inline std::size_t sample_outcome(const std::vector<MeasurementBranch> &branches, Rng &rng) {
    std::vector<double> w;
    w.reserve(branches.size());
    for (const auto &b : branches) {
        w.push_back(b.probability);
    }
    std::discrete_distribution<std::size_t> dist(w.begin(), w.end());
    return dist(rng);
}

/// Optimal single-copy success probability min(1, 2 * smallest squared Schmidt coefficient).
inline double p_e(const Ket &two_qubit) {
    detail::require(two_qubit.dim() == 4, ErrorCode::dimension_mismatch, "p_e: only two-qubit states are supported");
    const auto dec = schmidt(two_qubit, 2, 2);
    const double c = dec.coefficients[1];
    return std::min(1.0, 2.0 * c * c);
}

inline double p_e(const TwoQubitPure &state) { return p_e(state.ket()); }

/**
 * Two-outcome filter on one qubit of |Phi_lambda>. Outcome 0 leaves a maximally
 * entangled state with probability min(2cos^2, 2sin^2). For lambda > pi/4 the
 * roles of |0> and |1> swap.
 */
inline GeneralMeasurement procrustean(double lambda) {
    detail::require(lambda > 0.0 && lambda < 2.0 * quarter_pi, ErrorCode::no_entanglement,
                    "procrustean: lambda must lie in (0, pi/2); product states carry no entanglement");
    const bool swapped = lambda > quarter_pi;
    const double ratio = std::min(1.0, swapped ? 1.0 / std::tan(lambda) : std::tan(lambda));
    const double fail = std::sqrt(std::max(0.0, 1.0 - ratio * ratio));
    const std::size_t big = swapped ? 1 : 0; // basis vector carrying the larger amplitude
    ComplexMatrix m0(2, 2);
    ComplexMatrix m1(2, 2);
    m0(big, big) = ratio;
    m0(1 - big, 1 - big) = 1.0;
    m1(big, big) = fail;
    return GeneralMeasurement{{m0, m1}};
}

/// Procrustean filter for an arbitrary two-qubit pure state, built in its Schmidt basis on `wire` (0 or 1).
inline GeneralMeasurement procrustean_for(const Ket &two_qubit, std::size_t wire = 1) {
    detail::require(wire < 2, ErrorCode::dimension_mismatch, "procrustean_for: wire must be 0 or 1");
    const auto dec = schmidt(two_qubit, 2, 2);
    detail::require(dec.coefficients[1] > 1e-14, ErrorCode::no_entanglement,
                    "procrustean_for: state is a product state");
    const double ratio = std::min(1.0, dec.coefficients[1] / dec.coefficients[0]);
    const Ket big = wire == 0 ? dec.left_vector(0) : dec.right_vector(0);
    const Ket small = wire == 0 ? dec.left_vector(1) : dec.right_vector(1);
    ComplexMatrix m0 = ratio * big.projector() + small.projector();
    ComplexMatrix m1 = std::sqrt(std::max(0.0, 1.0 - ratio * ratio)) * big.projector();
    return GeneralMeasurement{{std::move(m0), std::move(m1)}};
}

} // namespace repeaterlab
