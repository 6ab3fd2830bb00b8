#include <catch2/catch_amalgamated.hpp>

#include <numbers>

#include "repeaterlab/criterion.hpp"
#include "repeaterlab/random.hpp"

using namespace repeaterlab;
using Catch::Approx;

namespace {
constexpr double pi = std::numbers::pi;

ProjectiveMeasurement random_basis(Rng &rng) {
    const auto u = random_unitary(4, rng);
    std::vector<Ket> kets;
    for (std::size_t c = 0; c < 4; ++c) {
        Ket k(4);
        for (std::size_t r = 0; r < 4; ++r) {
            k[r] = u(r, c);
        }
        kets.push_back(k);
    }
    return ProjectiveMeasurement::from_kets(kets);
}
} // namespace

TEST_CASE("t_operators: examples", "[criterion]") {
    auto t = t_operators(pi / 4, pi / 4);
    CHECK(max_abs_diff(t.t1, ComplexMatrix::diagonal({0.5, -0.5})) <= 1e-15);
    CHECK(max_abs_diff(t.t2, ComplexMatrix::diagonal({0.5, 0.5})) <= 1e-15);
    t = t_operators(pi / 6, pi / 4);
    CHECK(max_abs_diff(t.t1, ComplexMatrix::diagonal({0.75, -0.25})) <= 1e-15);
    CHECK(max_abs_diff(t.t2, ComplexMatrix::diagonal({0.5, 0.5})) <= 1e-15);
    for (double theta : {0.1, 0.4, 0.7}) {
        t = t_operators(theta, 0.75);
        CHECK(tensor(t.t1, t.t2).trace().real() == Approx(std::cos(2 * theta)).margin(1e-15));
        CHECK(t.t2.trace().real() == Approx(1.0).margin(1e-15));
    }
    CHECK_THROWS_AS(t_operators(0.5, 0.3), Error);
}

TEST_CASE("criterion_lhs: named bases at (pi/6, pi/4)", "[criterion]") {
    const double theta = pi / 6, eta = pi / 4;
    CHECK(criterion_lhs(build_optimal_basis(theta, eta).measurement(), theta, eta) == Approx(0.5).margin(1e-12));
    CHECK(criterion_lhs(bell_basis(), theta, eta) == Approx(0.5).margin(1e-12));
    CHECK(criterion_lhs(computational_basis(), theta, eta) == Approx(1.0).margin(1e-12));
    CHECK(achieved_rate(computational_basis(), theta, eta) == Approx(0.0).margin(1e-15));
    CHECK(achieved_rate(build_optimal_basis(theta, eta).measurement(), theta, eta) == Approx(0.5).margin(1e-12));
}

TEST_CASE("is_optimal: both routes agree on named bases", "[criterion]") {
    Rng rng = make_stream(61);
    std::uniform_real_distribution<double> ang(0.02, pi / 4);
    for (int trial = 0; trial < 20; ++trial) {
        const double theta = ang(rng), eta = ang(rng);
        const auto opt = is_optimal(build_optimal_basis(theta, eta).measurement(), theta, eta);
        const auto bell = is_optimal(bell_basis(), theta, eta);
        const auto comp = is_optimal(computational_basis(), theta, eta);
        CHECK(opt.optimal);
        CHECK(opt.rate_route_optimal);
        CHECK(bell.optimal);
        CHECK(bell.rate_route_optimal);
        CHECK_FALSE(comp.optimal);
        CHECK_FALSE(comp.rate_route_optimal);
        CHECK(opt.rhs == Approx(std::cos(2 * std::min(theta, eta))).margin(1e-15));
    }
}

TEST_CASE("criterion: identity and bounds over random bases", "[criterion][property]") {
    Rng rng = make_stream(62);
    std::uniform_real_distribution<double> ang(0.02, pi / 4);
    for (int trial = 0; trial < 200; ++trial) {
        const double theta = ang(rng), eta = ang(rng);
        const auto meas = random_basis(rng);
        const double lhs = criterion_lhs(meas, theta, eta);
        const double ps = achieved_rate(meas, theta, eta);
        const double small = std::min(theta, eta);
        CHECK(ps == Approx(1.0 - lhs).margin(1e-10));
        CHECK(lhs >= std::cos(2 * small) - 1e-10);
        CHECK(ps <= 2 * std::sin(small) * std::sin(small) + 1e-10);
        const auto r = is_optimal(meas, theta, eta);
        CHECK(r.optimal == r.rate_route_optimal);
    }
}

TEST_CASE("criterion: mirrored ordering matches swapped scenario", "[criterion]") {
    Rng rng = make_stream(63);
    for (int trial = 0; trial < 20; ++trial) {
        const auto meas = random_basis(rng);
        CHECK(criterion_lhs(meas, 0.6, 0.2) == Approx(criterion_lhs(meas.swapped_qubits(), 0.2, 0.6)).margin(1e-14));
        CHECK(achieved_rate(meas, 0.6, 0.2) == Approx(1.0 - criterion_lhs(meas, 0.6, 0.2)).margin(1e-10));
    }
}

TEST_CASE("criterion: rank above one is rejected", "[criterion]") {
    const auto p = ProjectiveMeasurement::from_projectors(
        {ComplexMatrix::diagonal({1.0, 1.0, 0.0, 0.0}), ComplexMatrix::diagonal({0.0, 0.0, 1.0, 1.0})});
    try {
        criterion_lhs(p, 0.3, 0.5);
        FAIL("expected dimension_mismatch");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::dimension_mismatch);
    }
    const auto q = ProjectiveMeasurement::from_projectors({ComplexMatrix::diagonal({1.0, 1.0, 0.0, 0.0}),
                                                            ComplexMatrix::diagonal({0.0, 0.0, 1.0, 0.0}),
                                                            ComplexMatrix::diagonal({0.0, 0.0, 0.0, 1.0}),
                                                            ComplexMatrix(4, 4)});
    try {
        criterion_lhs(q, 0.3, 0.5);
        FAIL("expected rank_not_one");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::rank_not_one);
    }
}
