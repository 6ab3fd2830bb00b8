#include <catch2/catch_amalgamated.hpp>

#include <numbers>

#include "repeaterlab/concentration.hpp"
#include "repeaterlab/random.hpp"
#include "repeaterlab/repeater.hpp"
#include "repeaterlab/states.hpp"

using namespace repeaterlab;
using Catch::Approx;

namespace {
constexpr double pi = std::numbers::pi;

void check_ket(const Ket &got, const Ket &want, double tol = 1e-15) {
    REQUIRE(got.dim() == want.dim());
    for (std::size_t i = 0; i < got.dim(); ++i) {
        CHECK(std::abs(got[i] - want[i]) <= tol);
    }
}
} // namespace

TEST_CASE("make_joint: amplitude vector", "[states]") {
    auto j = make_joint(pi / 4, pi / 4);
    for (double f : j.f) {
        CHECK(f == Approx(0.5).margin(1e-15));
    }
    j = make_joint(pi / 6, pi / 4);
    CHECK(j.f[0] == Approx(std::sqrt(6.0) / 4).margin(1e-15));
    CHECK(j.f[1] == Approx(std::sqrt(6.0) / 4).margin(1e-15));
    CHECK(j.f[2] == Approx(std::sqrt(2.0) / 4).margin(1e-15));
    CHECK(j.f[3] == Approx(std::sqrt(2.0) / 4).margin(1e-15));
    CHECK(j.ket.is_normalized());
}

TEST_CASE("make_joint: equals the reordered tensor product of the pairs", "[states][property]") {
    for (double theta : {0.1, 0.3, 0.6, pi / 4}) {
        for (double eta : {0.05, 0.4, 0.7}) {
            const auto j = make_joint(theta, eta);
            const Ket pair = tensor(TwoQubitPure{theta}.ket(), TwoQubitPure{eta}.ket()); // A C1 C2 B already
            check_ket(j.ket, pair, 1e-12);
            // Alice versus (Clare, Bob)
            const auto c = schmidt(j.ket, 2, 8).coefficients;
            CHECK(c[0] == Approx(std::cos(theta)).margin(1e-12));
            CHECK(c[1] == Approx(std::sin(theta)).margin(1e-12));
        }
    }
}

TEST_CASE("make_joint: angle range", "[states]") {
    CHECK_THROWS_AS(make_joint(0.0, 0.3), Error);
    CHECK_THROWS_AS(make_joint(0.3, 1.0), Error);
    try {
        make_joint(-0.1, 0.3);
        FAIL("expected angle_out_of_range");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::angle_out_of_range);
    }
    CHECK_NOTHROW(make_joint(0.3, 1.0, AngleRange::permissive));
    CHECK_THROWS_AS(make_joint(0.3, pi / 2, AngleRange::permissive), Error);
}

TEST_CASE("SchmidtState: validation", "[states]") {
    CHECK_NOTHROW(SchmidtState({0.5, 0.3, 0.2}));
    CHECK_THROWS_AS(SchmidtState({0.3, 0.7}), Error);
    CHECK_THROWS_AS(SchmidtState({0.6, 0.3}), Error);
    CHECK_THROWS_AS(SchmidtState({1.0, 0.0}), Error);
    CHECK_THROWS_AS(SchmidtState(std::vector<double>{}), Error);
    const SchmidtState s({0.75, 0.25});
    CHECK(overlap_squared(s.ket(), TwoQubitPure{pi / 6}.ket()) == Approx(1.0).margin(1e-15));
}

TEST_CASE("max_entangled: examples", "[states]") {
    const double h = 1.0 / std::sqrt(2.0);
    check_ket(max_entangled(ComplexMatrix::identity(2), 2), Ket{h, 0.0, 0.0, h});
    ComplexMatrix x(2, 2);
    x(0, 1) = x(1, 0) = 1.0;
    check_ket(max_entangled(x, 2), Ket{0.0, h, h, 0.0});

    Rng rng = make_stream(31);
    for (int trial = 0; trial < 10; ++trial) {
        const auto u = random_unitary(3, rng);
        const auto omega = max_entangled(u, 3);
        const std::vector<std::size_t> dims{3, 3};
        for (std::size_t side : {0u, 1u}) {
            const std::vector<std::size_t> keep{side};
            CHECK(max_abs_diff(partial_trace(omega.projector(), dims, keep), (1.0 / 3.0) * ComplexMatrix::identity(3)) <=
                  1e-12);
        }
    }
    ComplexMatrix bad = ComplexMatrix::diagonal({1.0, 2.0});
    try {
        max_entangled(bad, 2);
        FAIL("expected not_unitary");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::not_unitary);
    }
}

TEST_CASE("is_max_entangled: examples", "[states]") {
    CHECK(is_max_entangled(TwoQubitPure{pi / 4}.ket(), 2, 2));
    CHECK_FALSE(is_max_entangled(TwoQubitPure{pi / 6}.ket(), 2, 2));
    CHECK_FALSE(is_max_entangled(Ket::basis(4, 0), 2, 2));

    const auto joint = make_joint(0.3, 0.5);
    const auto basis = build_optimal_basis(0.3, 0.5);
    const Ket post = apply_local(basis.kets[0].as_bra(), joint.ket, wires::dims, 1, 2).normalized();
    CHECK(is_max_entangled(post, 2, 2));
    const auto c = schmidt(post, 2, 2).coefficients;
    CHECK(c[0] == Approx(c[1]).margin(1e-12));
}

TEST_CASE("p_e is invariant under local unitaries on either wire", "[states][property]") {
    Rng rng = make_stream(32);
    for (int trial = 0; trial < 50; ++trial) {
        const auto psi = random_ket(4, rng);
        const auto u = random_unitary(2, rng);
        const auto id = ComplexMatrix::identity(2);
        CHECK(p_e(tensor(u, id) * psi) == Approx(p_e(psi)).margin(1e-10));
        CHECK(p_e(tensor(id, u) * psi) == Approx(p_e(psi)).margin(1e-10));
    }
}

TEST_CASE("canonicalize: local unitaries reach the canonical pair", "[states]") {
    Rng rng = make_stream(33);
    for (int trial = 0; trial < 30; ++trial) {
        const auto psi = random_ket(4, rng);
        const auto cf = canonicalize(psi);
        CHECK(cf.angle >= 0.0);
        CHECK(cf.angle <= pi / 4 + 1e-12);
        CHECK(is_unitary(cf.alice));
        CHECK(is_unitary(cf.bob));
        const Ket moved = tensor(cf.alice, cf.bob) * psi;
        CHECK(overlap_squared(moved, TwoQubitPure{cf.angle}.ket()) == Approx(1.0).margin(1e-10));
        CHECK(schmidt_angle(psi) == Approx(cf.angle).margin(1e-12));
    }
    CHECK(canonical_angle(0.3) == 0.3);
    CHECK(canonical_angle(pi / 2 - 0.3) == Approx(0.3).margin(1e-15));
    CHECK_THROWS_AS(canonical_angle(pi / 2), Error);
}
