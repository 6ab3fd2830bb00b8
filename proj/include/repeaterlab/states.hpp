#pragma once

/**
 * @file
 * State constructors for the entanglement-swapping scenario.
 *
 * Wire convention for the four-qubit joint state: Alice, Clare's first
 * qubit, Clare's second qubit, Bob. The left pair lives on (Alice, Clare_1)
 * and the right pair on (Clare_2, Bob), so the flat index is
 * a*8 + c1*4 + c2*2 + b. Clare's two-qubit register index (c1, c2) and the
 * Alice-Bob index (a, b) therefore share the ordering |k> = |k_left k_right>.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "qmath.hpp"

namespace repeaterlab {

namespace wires {
inline constexpr std::size_t alice = 0;
inline constexpr std::size_t clare_left = 1;
inline constexpr std::size_t clare_right = 2;
inline constexpr std::size_t bob = 3;
inline constexpr std::array<std::size_t, 4> dims{2, 2, 2, 2};
} // namespace wires

inline constexpr double quarter_pi = std::numbers::pi / 4.0;

/// Slack on the closed upper end of (0, pi/4] so grid points computed as pi/4 * i / n pass.
inline constexpr double angle_slack = 1e-12;

enum class AngleRange {
    strict,     ///< (0, pi/4]
    permissive, ///< (0, pi/2)
};

inline void check_angle(double angle, AngleRange range, const char *name) {
    const double upper = range == AngleRange::strict ? quarter_pi + angle_slack : 2.0 * quarter_pi;
    const bool ok = angle > 0.0 && (range == AngleRange::strict ? angle <= upper : angle < upper);
    detail::require(ok, ErrorCode::angle_out_of_range,
                    std::string(name) + " = " + std::to_string(angle) +
                        (range == AngleRange::strict ? " is outside (0, pi/4]" : " is outside (0, pi/2)"));
}

/// cos(angle)|00> + sin(angle)|11>
struct TwoQubitPure {
    double angle = quarter_pi;

    [[nodiscard]] Ket ket() const { return Ket{std::cos(angle), 0.0, 0.0, std::sin(angle)}; }
};

/// General bipartite pure state sum_k sqrt(p_k)|k>|k>, p_k the squared Schmidt coefficients.
class SchmidtState {
  public:
    explicit SchmidtState(std::vector<double> probabilities) : p_(std::move(probabilities)) {
        detail::require(!p_.empty(), ErrorCode::invalid_schmidt, "Schmidt state needs at least one coefficient");
        double sum = 0.0;
        for (std::size_t k = 0; k < p_.size(); ++k) {
            detail::require(p_[k] > 0.0, ErrorCode::invalid_schmidt, "Schmidt coefficients must be strictly positive");
            detail::require(k == 0 || p_[k] <= p_[k - 1], ErrorCode::invalid_schmidt,
                            "Schmidt coefficients must be nonincreasing");
            sum += p_[k];
        }
        detail::require(std::abs(sum - 1.0) <= 1e-12, ErrorCode::invalid_schmidt,
                        "Schmidt coefficients must sum to 1 (got " + std::to_string(sum) + ")");
    }

    [[nodiscard]] std::size_t dim() const noexcept { return p_.size(); }
    [[nodiscard]] const std::vector<double> &probabilities() const noexcept { return p_; }
    [[nodiscard]] double operator[](std::size_t k) const { return p_[k]; }

    [[nodiscard]] Ket ket() const {
        const std::size_t d = dim();
        Ket psi(d * d);
        for (std::size_t k = 0; k < d; ++k) {
            psi[k * d + k] = std::sqrt(p_[k]);
        }
        return psi;
    }

  private:
    std::vector<double> p_;
};

struct JointScenario {
    double theta = 0.0; ///< Alice-Clare pair angle
    double eta = 0.0;   ///< Clare-Bob pair angle
    std::array<double, 4> f{}; ///< amplitudes of |k>_AB |k>_C
    Ket ket;                   ///< 16 amplitudes in wire order (A, C1, C2, B)
};

inline JointScenario make_joint(double theta, double eta, AngleRange range = AngleRange::strict) {
    check_angle(theta, range, "theta");
    check_angle(eta, range, "eta");
    JointScenario s;
    s.theta = theta;
    s.eta = eta;
    const std::array<double, 2> left{std::cos(theta), std::sin(theta)};
    const std::array<double, 2> right{std::cos(eta), std::sin(eta)};
    s.ket = Ket(16);
    for (std::size_t a = 0; a < 2; ++a) {
        for (std::size_t b = 0; b < 2; ++b) {
            const double amp = left[a] * right[b];
            s.f[a * 2 + b] = amp;
            s.ket[a * 8 + a * 4 + b * 2 + b] = amp;
        }
    }
    return s;
}

/// (U (x) I) (1/sqrt d) sum_k |k>|k>
inline Ket max_entangled(const ComplexMatrix &u, std::size_t d) {
    detail::require(u.rows() == d && u.cols() == d, ErrorCode::dimension_mismatch, "max_entangled: U must be d x d");
    detail::require(is_unitary(u), ErrorCode::not_unitary, "max_entangled: U is not unitary");
    Ket omega(d * d);
    const double amp = 1.0 / std::sqrt(static_cast<double>(d));
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t k = 0; k < d; ++k) {
            omega[i * d + k] = u(i, k) * amp;
        }
    }
    return omega;
}

inline bool is_max_entangled(const Ket &psi, std::size_t dim_a, std::size_t dim_b, double tolerance = 1e-10) {
    const auto dec = schmidt(psi, dim_a, dim_b);
    const double target = 1.0 / std::sqrt(static_cast<double>(std::min(dim_a, dim_b)));
    return std::all_of(dec.coefficients.begin(), dec.coefficients.end(),
                       [&](double c) { return std::abs(c - target) <= tolerance; });
}

/// Angle lambda in [0, pi/4] with Schmidt coefficients (cos lambda, sin lambda).
inline double schmidt_angle(const Ket &two_qubit) {
    detail::require(two_qubit.dim() == 4, ErrorCode::dimension_mismatch, "schmidt_angle: expects a two-qubit ket");
    const auto dec = schmidt(two_qubit, 2, 2);
    return std::atan2(dec.coefficients[1], dec.coefficients[0]);
}

/// Local unitaries taking an arbitrary two-qubit pure state to |Phi_angle>, angle in [0, pi/4].
struct CanonicalForm {
    double angle = 0.0;
    ComplexMatrix alice; ///< (alice (x) bob) psi = |Phi_angle>, up to the state's own global phase
    ComplexMatrix bob;
};

inline CanonicalForm canonicalize(const Ket &two_qubit) {
    detail::require(two_qubit.dim() == 4, ErrorCode::dimension_mismatch, "canonicalize: expects a two-qubit ket");
    const auto dec = schmidt(two_qubit, 2, 2);
    CanonicalForm out;
    out.angle = std::atan2(dec.coefficients[1], dec.coefficients[0]);
    out.alice = dec.left.adjoint();
    out.bob = dec.right.adjoint();
    return out;
}

/// Maps a permissive-range angle to the strict range via |Phi_l> = (X (x) X)|Phi_{pi/2 - l}>.
inline double canonical_angle(double angle) {
    check_angle(angle, AngleRange::permissive, "angle");
    return angle > quarter_pi ? 2.0 * quarter_pi - angle : angle;
}

} // namespace repeaterlab
