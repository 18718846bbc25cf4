#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qsv/errors.hpp"
#include "qsv/states.hpp"

using namespace qsv;

TEST_CASE("elementary kets are unit vectors with the right overlaps") {
    CHECK(norm(ket0()) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(norm(ket1()) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(dot(ket0(), ket1())) == 0.0);
    CHECK(std::abs(dot(ket_plus(), ket_minus())) < 1e-15);
    CHECK(std::abs(dot(ket_plus_i(), ket_minus_i())) < 1e-15);
    CHECK(std::abs(dot(ket_plus(), ket0()) - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(dot(ket_plus_i(), ket1()) - cplx(0, -1) / std::sqrt(2.0)) <
          1e-15);
}

TEST_CASE("target state construction") {
    const TargetState t = make_target(0.25);
    CHECK(norm(t.psi) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(norm(t.psi_perp) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(dot(t.psi, t.psi_perp)) < 1e-15);
    CHECK(std::abs(t.psi[0] - std::sqrt(0.75)) < 1e-15);
    CHECK(std::abs(t.psi[1]) == 0.0);
    CHECK(std::abs(t.psi[2]) == 0.0);
    CHECK(std::abs(t.psi[3] - 0.5) < 1e-15);
    CHECK(std::abs(t.psi_perp[0] - 0.5) < 1e-15);
    CHECK(std::abs(t.psi_perp[3] + std::sqrt(0.75)) < 1e-15);

    CHECK_THROWS_AS(make_target(-0.1), OutOfRangeLambda);
    CHECK_THROWS_AS(make_target(0.6), OutOfRangeLambda);
    CHECK_NOTHROW(make_target(0.0));
    CHECK_NOTHROW(make_target(0.5));
}

TEST_CASE("paired phase rotations leave the target invariant") {
    for (double lambda : {0.0, 0.1, 0.25, 0.5}) {
        const TargetState t = make_target(lambda);
        for (double theta : {0.3, 1.0, 2.2, 5.9}) {
            const auto [ua, ub] = local_phase_unitary(theta);
            const Ket4 rotated = (on_alice(ua) * on_bob(ub)) * t.psi;
            CHECK(norm(rotated - t.psi) < 1e-14);
        }
    }
}

TEST_CASE("one-shot accept directions have the advertised geometry") {
    for (double lambda : {0.0, 0.1, 0.25, 0.5}) {
        const OneWayVectors v = make_one_way_vectors(lambda);
        CHECK(norm(v.v_plus) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(norm(v.v_minus) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(norm(v.w_plus) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(norm(v.w_minus) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(std::abs(dot(v.v_plus, v.v_minus) - (1.0 - 2.0 * lambda)) < 1e-14);
        CHECK(std::abs(dot(v.w_plus, v.w_minus) - (1.0 - 2.0 * lambda)) < 1e-14);
    }
}

TEST_CASE("three-step direction vectors: coefficients, norms, overlaps") {
    const TwoWayVectors v = make_two_way_vectors(0.25, 0.5);
    // den = 1 - 0.5 + 0.25*0.5 = 0.625; A = 0.75*0.5/0.625 = 0.6; B = 0.25/0.625 = 0.4
    CHECK(v.a_coeff == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(v.b_coeff == doctest::Approx(0.4).epsilon(1e-14));
    const double norm_sq = 0.5 * 0.6 + 0.4; // (1-delta)A + B = 0.7
    CHECK(norm(v.v_plus) * norm(v.v_plus) == doctest::Approx(norm_sq).epsilon(1e-13));
    CHECK(norm(v.w_minus) * norm(v.w_minus) == doctest::Approx(norm_sq).epsilon(1e-13));
    // <v+|v-> = (1-delta)A - B = -0.1, same for the w pair.
    CHECK(std::abs(dot(v.v_plus, v.v_minus) - (-0.1)) < 1e-14);
    CHECK(std::abs(dot(v.w_plus, v.w_minus) - (-0.1)) < 1e-14);

    CHECK_THROWS_AS(make_two_way_vectors(0.0, 1.0), SingularDenominator);
    CHECK_THROWS_AS(make_two_way_vectors(0.7, 0.5), OutOfRangeLambda);
    CHECK_THROWS_AS(make_two_way_vectors(0.25, 1.5), OutOfRangeDelta);
    CHECK_THROWS_AS(make_two_way_vectors(0.25, -0.1), OutOfRangeDelta);
    CHECK_NOTHROW(make_two_way_vectors(0.25, 1.0)); // den = lambda > 0
}

TEST_CASE("general measurement directions and their accept partners") {
    std::mt19937_64 eng(5150);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int rep = 0; rep < 200; ++rep) {
        const double t = unit(eng);
        const double s = 2.0 * M_PI * unit(eng);
        const double lambda = 0.5 * unit(eng);
        const AliceDirectionState d = make_direction_state(t, s, lambda);
        CHECK(norm(d.ket) == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(norm(d.partner) == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(d.t == t);
        CHECK(d.s == s);

        Ket2 expect_ket{};
        expect_ket[0] = std::sqrt(t);
        expect_ket[1] = std::exp(cplx(0, s)) * std::sqrt(1.0 - t);
        CHECK(norm(d.ket - expect_ket) < 1e-13);

        Ket2 raw{};
        raw[0] = std::sqrt(t * (1.0 - lambda));
        raw[1] = std::exp(cplx(0, -s)) * std::sqrt((1.0 - t) * lambda);
        CHECK(norm(d.partner - normalized(raw)) < 1e-12);
    }
}

TEST_CASE("degenerate direction corner falls back to |1>") {
    const AliceDirectionState d = make_direction_state(0.0, 1.3, 0.0);
    CHECK(norm(d.partner - ket1()) < 1e-15);
    // Nearby the corner the partner limits to |1> up to a phase.
    const AliceDirectionState near = make_direction_state(0.0, 1.3, 1e-12);
    CHECK(std::abs(dot(ket1(), near.partner)) == doctest::Approx(1.0).epsilon(1e-10));
}
