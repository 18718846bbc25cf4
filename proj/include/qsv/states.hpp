#pragma once

#include <utility>

#include "qsv/algebra.hpp"

namespace qsv {

// --- elementary single-qubit kets ---------------------------------------

Ket2 ket0();
Ket2 ket1();
Ket2 ket_plus();    // (|0> + |1>)/sqrt(2)
Ket2 ket_minus();   // (|0> - |1>)/sqrt(2)
Ket2 ket_plus_i();  // (|0> + i|1>)/sqrt(2)
Ket2 ket_minus_i(); // (|0> - i|1>)/sqrt(2)

// --- target state --------------------------------------------------------

// Schmidt-form target |psi> = sqrt(1-lambda)|00> + sqrt(lambda)|11> together
// with its orthogonal partner in the same Schmidt plane,
// |psi_perp> = sqrt(lambda)|00> - sqrt(1-lambda)|11>.
struct TargetState {
    double lambda = 0;
    Ket4 psi;
    Ket4 psi_perp;
};

// Throws OutOfRangeLambda unless lambda is in [0, 1/2].
TargetState make_target(double lambda);

// Phase rotations (diag(1, e^{i theta}), diag(1, e^{-i theta})).
// Applying the pair as a product leaves the target state invariant.
std::pair<Mat2, Mat2> local_phase_unitary(double theta);

// --- measurement-direction vectors ---------------------------------------

// Bob's accept directions for the three one-shot tests:
//   v_pm = sqrt(1-lambda)|0> +- sqrt(lambda)|1>        (paired with X outcomes)
//   w_pm = sqrt(1-lambda)|0> +- i sqrt(lambda)|1>      (paired with Y outcomes)
// All four are unit vectors; <v+|v-> = <w+|w-> = 1 - 2 lambda.
struct OneWayVectors {
    Ket2 v_plus, v_minus, w_plus, w_minus;
};

OneWayVectors make_one_way_vectors(double lambda);

// Unnormalized vectors entering the three-step tests, built from
//   A = (1-lambda)(1-delta) / (1-delta+lambda*delta),
//   B = lambda / (1-delta+lambda*delta):
//   v_pm = sqrt((1-delta)A)|0> +- sqrt(B)|1>
//   w_pm = sqrt((1-delta)A)|0> +- i sqrt(B)|1>
// Norm^2 of each is (1-delta)A + B.
struct TwoWayVectors {
    double a_coeff = 0, b_coeff = 0;
    Ket2 v_plus, v_minus, w_plus, w_minus;
};

// Throws OutOfRangeLambda / OutOfRangeDelta outside [0,1/2] x [0,1] and
// SingularDenominator when 1 - delta + lambda*delta <= 1e-15 (which happens
// only at lambda = 0, delta = 1; callers special-case that corner).
TwoWayVectors make_two_way_vectors(double lambda, double delta);

// One measurement direction of the general one-way family:
//   ket     = sqrt(t)|0> + e^{is} sqrt(1-t)|1>           (Alice's direction)
//   partner = normalized( sqrt(t(1-lambda))|0> + e^{-is} sqrt((1-t)lambda)|1> )
// At the degenerate corner t = 0, lambda = 0 the partner's defining vector
// vanishes; the convention partner = |1> is used there (the limit along
// lambda -> 0+ at t = 0, which keeps the endpoint distribution's assembled
// operator equal to the Z-basis test for every lambda).
struct AliceDirectionState {
    double t = 0, s = 0;
    Ket2 ket;
    Ket2 partner;
};

AliceDirectionState make_direction_state(double t, double s, double lambda);

} // namespace qsv
