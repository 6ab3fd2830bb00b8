#pragma once

/**
 * @file
 * Entanglement swapping with a repeater node (Clare) between Alice and Bob.
 *
 * Clare measures her two qubits in a rank-1 projective basis. Outcomes that
 * leave Alice and Bob maximally entangled need nothing further; for the
 * others Bob applies a Procrustean filter built from the post-measurement
 * state. With the basis from `build_optimal_basis` two outcomes are
 * immediately successful and the overall rate still reaches
 * min(2 sin^2 theta, 2 sin^2 eta), the single-pair optimum.
 */

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "concentration.hpp"
#include "qmath.hpp"
#include "random.hpp"
#include "states.hpp"

namespace repeaterlab {

/// Orthogonal projectors summing to identity.
class ProjectiveMeasurement {
  public:
    static ProjectiveMeasurement from_kets(const std::vector<Ket> &kets, double tolerance = 1e-10) {
        detail::require(!kets.empty(), ErrorCode::not_projective, "projective measurement needs at least one ket");
        for (std::size_t i = 0; i < kets.size(); ++i) {
            detail::require(kets[i].dim() == kets.front().dim(), ErrorCode::dimension_mismatch,
                            "basis kets have different dimensions");
            for (std::size_t j = i; j < kets.size(); ++j) {
                const double expected = i == j ? 1.0 : 0.0;
                detail::require(std::abs(inner(kets[i], kets[j]) - expected) <= tolerance, ErrorCode::not_projective,
                                "basis kets are not orthonormal");
            }
        }
        std::vector<ComplexMatrix> projectors;
        projectors.reserve(kets.size());
        for (const auto &k : kets) {
            projectors.push_back(k.projector());
        }
        return ProjectiveMeasurement(std::move(projectors), kets, tolerance);
    }

    static ProjectiveMeasurement from_projectors(std::vector<ComplexMatrix> projectors, double tolerance = 1e-10) {
        return ProjectiveMeasurement(std::move(projectors), std::nullopt, tolerance);
    }

    [[nodiscard]] const std::vector<ComplexMatrix> &projectors() const noexcept { return projectors_; }
    [[nodiscard]] std::size_t size() const noexcept { return projectors_.size(); }
    [[nodiscard]] std::size_t dim() const { return projectors_.front().rows(); }
    [[nodiscard]] std::size_t rank(std::size_t k) const {
        return static_cast<std::size_t>(std::llround(projectors_[k].trace().real()));
    }
    [[nodiscard]] bool rank_one() const {
        for (std::size_t k = 0; k < size(); ++k) {
            if (rank(k) != 1) {
                return false;
            }
        }
        return true;
    }

    /// Basis kets (only for rank-1 measurements). Recovered from the projectors up to phase
    /// when the measurement was not built from kets.
    [[nodiscard]] std::vector<Ket> kets() const {
        detail::require(rank_one(), ErrorCode::rank_not_one, "measurement has a projector of rank != 1");
        if (kets_) {
            return *kets_;
        }
        std::vector<Ket> out;
        for (const auto &p : projectors_) {
            std::size_t best = 0;
            for (std::size_t j = 1; j < p.cols(); ++j) {
                if (p(j, j).real() > p(best, best).real()) {
                    best = j;
                }
            }
            Ket v(p.rows());
            for (std::size_t i = 0; i < p.rows(); ++i) {
                v[i] = p(i, best);
            }
            out.push_back(v.normalized());
        }
        return out;
    }

    /// Same measurement with Clare's two qubits exchanged (SWAP P_k SWAP), dim 4 only.
    [[nodiscard]] ProjectiveMeasurement swapped_qubits() const {
        detail::require(dim() == 4, ErrorCode::dimension_mismatch, "swapped_qubits needs a two-qubit measurement");
        ComplexMatrix swap(4, 4);
        swap(0, 0) = swap(1, 2) = swap(2, 1) = swap(3, 3) = 1.0;
        std::vector<ComplexMatrix> projectors;
        for (const auto &p : projectors_) {
            projectors.push_back(swap * p * swap);
        }
        std::optional<std::vector<Ket>> kets;
        if (kets_) {
            kets.emplace();
            for (const auto &k : *kets_) {
                kets->push_back(swap * k);
            }
        }
        return ProjectiveMeasurement(std::move(projectors), std::move(kets), 1e-10);
    }

  private:
    ProjectiveMeasurement(std::vector<ComplexMatrix> projectors, std::optional<std::vector<Ket>> kets,
                          double tolerance)
        : projectors_(std::move(projectors)), kets_(std::move(kets)) {
        detail::require(!projectors_.empty(), ErrorCode::not_projective, "projective measurement is empty");
        const std::size_t n = projectors_.front().rows();
        ComplexMatrix sum(n, n);
        for (std::size_t i = 0; i < projectors_.size(); ++i) {
            const auto &p = projectors_[i];
            detail::require(p.rows() == n && p.cols() == n, ErrorCode::dimension_mismatch,
                            "projectors have different shapes");
            detail::require(is_hermitian(p, tolerance), ErrorCode::not_projective, "projector is not Hermitian");
            detail::require(max_abs_diff(p * p, p) <= tolerance, ErrorCode::not_projective,
                            "projector is not idempotent");
            for (std::size_t j = i + 1; j < projectors_.size(); ++j) {
                detail::require((p * projectors_[j]).max_abs() <= tolerance, ErrorCode::not_projective,
                                "projectors are not mutually orthogonal");
            }
            sum += p;
        }
        detail::require(max_abs_diff(sum, ComplexMatrix::identity(n)) <= tolerance, ErrorCode::not_projective,
                        "projectors do not sum to the identity");
    }

    std::vector<ComplexMatrix> projectors_;
    std::optional<std::vector<Ket>> kets_;
};

inline ProjectiveMeasurement bell_basis() {
    const double h = 1.0 / std::sqrt(2.0);
    return ProjectiveMeasurement::from_kets({
        Ket{h, 0.0, 0.0, h},
        Ket{h, 0.0, 0.0, -h},
        Ket{0.0, h, h, 0.0},
        Ket{0.0, h, -h, 0.0},
    });
}

inline ProjectiveMeasurement computational_basis(std::size_t dim = 4) {
    std::vector<Ket> kets;
    for (std::size_t k = 0; k < dim; ++k) {
        kets.push_back(Ket::basis(dim, k));
    }
    return ProjectiveMeasurement::from_kets(kets);
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

struct ProjectionBounds {
    double lower = 0.0;
    double upper = 0.0;
};

/// Range of the probability of a single projection that leaves Alice and Bob maximally entangled.
inline ProjectionBounds projection_bounds(double theta, double eta) {
    check_angle(theta, AngleRange::strict, "theta");
    check_angle(eta, AngleRange::strict, "eta");
    const double s2t = std::sin(2.0 * theta);
    const double s2e = std::sin(2.0 * eta);
    const double cc = std::cos(2.0 * theta) * std::cos(2.0 * eta);
    const double num = s2t * s2t * s2e * s2e;
    return {num / (4.0 * (1.0 + cc)), num / (4.0 * (1.0 - cc))};
}

/// Probabilities and Bob's conditional success rates for the optimal basis, straight from the f_k.
struct ClosedForm {
    std::array<double, 4> p{};
    double q = 0.0;       ///< Bob's success after outcome 3
    double q_prime = 0.0; ///< Bob's success after outcome 4
    double p_ms = 0.0;
};

inline ClosedForm closed_form(double theta, double eta) {
    const auto f = make_joint(theta, eta).f;
    const auto sq = [](double x) { return x * x; };
    const double f0 = sq(f[0]), f1 = sq(f[1]), f2 = sq(f[2]), f3 = sq(f[3]);
    ClosedForm c;
    c.p[0] = 2.0 * f1 * f2 / (f1 + f2);
    c.p[1] = 2.0 * f0 * f3 / (f0 + f3);
    c.p[2] = (f1 * f1 + f2 * f2) / (f1 + f2);
    c.p[3] = (f0 * f0 + f3 * f3) / (f0 + f3);
    // min() replaces the "eta >= theta" labelling, so either ordering works.
    c.q = 2.0 * sq(std::min(f1, f2)) / (f1 * f1 + f2 * f2);
    c.q_prime = 2.0 * sq(std::min(f0, f3)) / (f0 * f0 + f3 * f3);
    c.p_ms = c.p[0] + c.p[1] + c.p[2] * c.q + c.p[3] * c.q_prime;
    return c;
}

/// Probability that one of the two immediately successful outcomes occurs (closed form).
inline double direct_success_closed_form(double theta, double eta) {
    check_angle(theta, AngleRange::strict, "theta");
    check_angle(eta, AngleRange::strict, "eta");
    const double s2t = std::sin(2.0 * theta);
    const double s2e = std::sin(2.0 * eta);
    const double c2t = std::cos(2.0 * theta);
    const double c2e = std::cos(2.0 * eta);
    return s2t * s2t * s2e * s2e / (2.0 * (1.0 - c2t * c2t * c2e * c2e));
}

/// Total probability of the three successful outcomes when both pairs share the angle theta.
inline double same_state_success_closed_form(double theta) {
    check_angle(theta, AngleRange::strict, "theta");
    const double s = std::sin(2.0 * theta);
    const double c = std::cos(2.0 * theta);
    return s * s * (3.0 + c * c) / (4.0 * (1.0 + c * c));
}

// ---------------------------------------------------------------------------
// Optimal basis
// ---------------------------------------------------------------------------

struct OptimalBasis {
    std::array<Ket, 4> kets;
    double beta1 = 0.0;
    double beta2 = 0.0;

    [[nodiscard]] ProjectiveMeasurement measurement() const {
        return ProjectiveMeasurement::from_kets({kets.begin(), kets.end()});
    }
};

/**
 * Clare's basis. Outcome 1 reaches the upper projection bound and outcome 2
 * the lower one, both leaving a maximally entangled pair; outcomes 3 and 4
 * complete the basis. beta1, beta2 are free phases.
 */
inline OptimalBasis build_optimal_basis(double theta, double eta, double beta1 = 0.0, double beta2 = 0.0) {
    const auto f = make_joint(theta, eta).f;
    const cplx e1 = std::polar(1.0, beta1);
    const cplx e2 = std::polar(1.0, beta2);
    const double n12 = std::sqrt(f[1] * f[1] + f[2] * f[2]);
    const double n03 = std::sqrt(f[0] * f[0] + f[3] * f[3]);
    OptimalBasis b;
    b.beta1 = beta1;
    b.beta2 = beta2;
    b.kets[0] = Ket{0.0, f[2] / n12, e1 * f[1] / n12, 0.0};
    b.kets[1] = Ket{f[3] / n03, 0.0, 0.0, e2 * f[0] / n03};
    b.kets[2] = Ket{0.0, f[1] / n12, -e1 * f[2] / n12, 0.0};
    b.kets[3] = Ket{f[0] / n03, 0.0, 0.0, -e2 * f[3] / n03};
    return b;
}

// ---------------------------------------------------------------------------
// Exact protocol analysis
// ---------------------------------------------------------------------------

struct SwapBranch {
    double probability = 0.0;
    std::optional<Ket> post_state; ///< Alice-Bob state, normalized
};

/// Projects Clare's register of the joint state onto each basis ket (Born rule on the 16-dim ket).
inline std::vector<SwapBranch> swap_branches(const JointScenario &joint, const ProjectiveMeasurement &meas) {
    detail::require(meas.dim() == 4, ErrorCode::dimension_mismatch, "Clare's measurement must act on two qubits");
    std::vector<SwapBranch> out;
    for (const auto &k : meas.kets()) {
        Ket ab = apply_local(k.as_bra(), joint.ket, wires::dims, wires::clare_left, 2);
        SwapBranch b;
        b.probability = ab.norm_squared();
        if (b.probability > 1e-300) {
            b.post_state = ab.normalized();
        }
        out.push_back(std::move(b));
    }
    return out;
}

struct OutcomeAnalysis {
    std::size_t index = 0; ///< 1-based outcome label
    double probability = 0.0;
    std::optional<Ket> post_state;
    double schmidt_angle = 0.0;
    bool maximal = false;  ///< maximally entangled with no further operation
    bool bob_acts = false; ///< Bob applies his filter after this outcome
    double bob_success = 0.0; ///< conditional probability of ending maximally entangled
    std::optional<GeneralMeasurement> bob_measurement;
};

struct LoccLedger {
    std::size_t classical_bits_sent = 0;
    std::size_t local_measurements = 0;
    std::size_t measurement_outcomes_total = 0;
};

struct ProtocolAnalysis {
    double theta = 0.0;
    double eta = 0.0;
    double p_ms = 0.0;
    std::vector<OutcomeAnalysis> outcomes;
    std::size_t classical_bits_sent = 2;
    double bob_acts_probability = 0.0;
    double expected_local_measurements = 0.0;
};

inline constexpr double maximal_tolerance = 1e-10;

/// Full protocol for an arbitrary rank-1 basis on Clare's register.
inline ProtocolAnalysis analyze_protocol(double theta, double eta, const ProjectiveMeasurement &meas) {
    const auto joint = make_joint(theta, eta);
    const auto branches = swap_branches(joint, meas);
    ProtocolAnalysis a;
    a.theta = theta;
    a.eta = eta;
    for (std::size_t k = 0; k < branches.size(); ++k) {
        OutcomeAnalysis o;
        o.index = k + 1;
        o.probability = branches[k].probability;
        o.post_state = branches[k].post_state;
        if (o.post_state) {
            const auto &post = *o.post_state;
            o.schmidt_angle = schmidt_angle(post);
            o.maximal = is_max_entangled(post, 2, 2, maximal_tolerance);
            if (o.maximal) {
                o.bob_success = 1.0;
            } else if (std::sin(o.schmidt_angle) > 1e-14) {
                o.bob_acts = true;
                auto m = procrustean_for(post, 1);
                const auto bob = apply_measurement(m, post, 1);
                const bool filtered_ok = bob[0].state && is_max_entangled(*bob[0].state, 2, 2, maximal_tolerance);
                o.bob_success = filtered_ok ? bob[0].probability : 0.0;
                o.bob_measurement = std::move(m);
            }
        }
        a.p_ms += o.probability * o.bob_success;
        if (o.bob_acts) {
            a.bob_acts_probability += o.probability;
        }
        a.outcomes.push_back(std::move(o));
    }
    a.expected_local_measurements = 1.0 + a.bob_acts_probability;
    return a;
}

inline ProtocolAnalysis run_protocol_analytic(double theta, double eta, double beta1 = 0.0, double beta2 = 0.0) {
    return analyze_protocol(theta, eta, build_optimal_basis(theta, eta, beta1, beta2).measurement());
}

/// p(phi_1) + p(phi_2) of the optimal basis, from the simulated branches.
inline double direct_success_prob(double theta, double eta) {
    const auto a = run_protocol_analytic(theta, eta);
    return a.outcomes[0].probability + a.outcomes[1].probability;
}

// ---------------------------------------------------------------------------
// Monte-Carlo runs
// ---------------------------------------------------------------------------

struct ProtocolRun {
    std::size_t outcome = 0; ///< Clare's outcome, 1-based
    double clare_prob = 0.0;
    bool bob_acted = false;
    std::optional<std::size_t> bob_outcome; ///< 0 = filter succeeded
    bool final_success = false;
    Ket final_state;
    LoccLedger ledger;
};

/// Precomputed branch data so each shot only draws random numbers.
class ProtocolSampler {
  public:
    explicit ProtocolSampler(ProtocolAnalysis analysis) : analysis_(std::move(analysis)) {
        std::vector<double> w;
        for (const auto &o : analysis_.outcomes) {
            w.push_back(o.probability);
            if (o.bob_acts) {
                bob_branches_.push_back(apply_measurement(*o.bob_measurement, *o.post_state, 1));
                bob_success_state_.push_back(bob_branches_.back()[0].state &&
                                             is_max_entangled(*bob_branches_.back()[0].state, 2, 2, maximal_tolerance));
            } else {
                bob_branches_.emplace_back();
                bob_success_state_.push_back(false);
            }
        }
        clare_ = std::discrete_distribution<std::size_t>(w.begin(), w.end());
    }

    [[nodiscard]] const ProtocolAnalysis &analysis() const noexcept { return analysis_; }

    ProtocolRun operator()(Rng &rng) {
        ProtocolRun run;
        const std::size_t k = clare_(rng);
        const auto &o = analysis_.outcomes[k];
        run.outcome = k + 1;
        run.clare_prob = o.probability;
        run.ledger.classical_bits_sent = 2;
        run.ledger.local_measurements = 1;
        run.ledger.measurement_outcomes_total = analysis_.outcomes.size();
        if (o.bob_acts) {
            const auto &branches = bob_branches_[k];
            const std::size_t b = sample_outcome(branches, rng);
            run.bob_acted = true;
            run.bob_outcome = b;
            run.ledger.local_measurements += 1;
            run.ledger.measurement_outcomes_total += branches.size();
            run.final_state = *branches[b].state;
            run.final_success = b == 0 && bob_success_state_[k];
        } else {
            run.final_state = *o.post_state;
            run.final_success = o.maximal;
        }
        return run;
    }

  private:
    ProtocolAnalysis analysis_;
    std::discrete_distribution<std::size_t> clare_;
    std::vector<std::vector<MeasurementBranch>> bob_branches_;
    std::vector<bool> bob_success_state_;
};

struct SampledEstimate {
    double theta = 0.0;
    double eta = 0.0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::size_t successes = 0;
    std::size_t bob_acts = 0;
    double estimate = 0.0;
    double standard_error = 0.0; ///< binomial, sqrt(p(1-p)/n) at the estimate
    double bob_acts_frequency = 0.0;
    double bob_acts_standard_error = 0.0;
    double mean_classical_bits = 0.0;
    double mean_local_measurements = 0.0;
};

inline SampledEstimate run_protocol_sampled(double theta, double eta, std::size_t n, std::uint64_t seed,
                                            double beta1 = 0.0, double beta2 = 0.0) {
    detail::require(n >= 1, ErrorCode::dimension_mismatch, "run_protocol_sampled: n must be at least 1");
    ProtocolSampler sampler(run_protocol_analytic(theta, eta, beta1, beta2));
    Rng rng = make_stream(seed);
    SampledEstimate s;
    s.theta = theta;
    s.eta = eta;
    s.n = n;
    s.seed = seed;
    std::size_t bits = 0;
    std::size_t measurements = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto run = sampler(rng);
        s.successes += run.final_success ? 1 : 0;
        s.bob_acts += run.bob_acted ? 1 : 0;
        bits += run.ledger.classical_bits_sent;
        measurements += run.ledger.local_measurements;
    }
    const double nn = static_cast<double>(n);
    s.estimate = static_cast<double>(s.successes) / nn;
    s.standard_error = std::sqrt(s.estimate * (1.0 - s.estimate) / nn);
    s.bob_acts_frequency = static_cast<double>(s.bob_acts) / nn;
    s.bob_acts_standard_error = std::sqrt(s.bob_acts_frequency * (1.0 - s.bob_acts_frequency) / nn);
    s.mean_classical_bits = static_cast<double>(bits) / nn;
    s.mean_local_measurements = static_cast<double>(measurements) / nn;
    return s;
}

// ---------------------------------------------------------------------------
// Comparison with Bell-basis swapping
// ---------------------------------------------------------------------------

struct BellComparison {
    double theta = 0.0;
    double eta = 0.0;
    ProtocolAnalysis optimal;
    ProtocolAnalysis bell;
    bool rates_equal = false;
};

inline BellComparison compare_with_bell(double theta, double eta) {
    BellComparison c;
    c.theta = theta;
    c.eta = eta;
    c.optimal = run_protocol_analytic(theta, eta);
    c.bell = analyze_protocol(theta, eta, bell_basis());
    c.rates_equal = std::abs(c.optimal.p_ms - c.bell.p_ms) <= 1e-10;
    return c;
}

} // namespace repeaterlab
