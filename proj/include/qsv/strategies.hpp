#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qsv/states.hpp"

namespace qsv {

enum class Basis { X, Y, Z };
enum class Direction { AtoB, BtoA };

enum class StrategyClass {
    OneWayAB,
    OneWayBA,
    TwoStepTwoWay,
    ThreeStepTwoWay,
    SeparableHomogeneous,
    Nonlocal,
    PlmReference,
};

// Recipe the simulator uses to realize one mixture element as an actual
// message-passing protocol (or, for elements with no protocol attached,
// as a direct Born-rule coin flip on tr(T sigma)).
struct ElementProtocol {
    enum class Kind {
        LocalBasisTest, // initiator measures X/Y, responder projects on the
                        // matching accept direction
        MatchedZTest,   // both parties measure Z; accept on listed outcome pairs
        ThreeStepTest,  // damping step + conditional X/Y + back-projection
        BornSample,     // accept with probability tr(T sigma), no messages
    };
    Kind kind = Kind::BornSample;
    Basis basis = Basis::Z;
    Direction dir = Direction::AtoB;
    double delta = 0.0;                            // ThreeStepTest only
    std::vector<std::pair<int, int>> accept_pairs; // MatchedZTest only
};

// One two-outcome test: the accept operator T (0 <= T <= 1), a label,
// the number of communication rounds its protocol needs (0 = no protocol
// attached), and whether T fixes the target state.
struct PovmElement {
    Mat4 op;
    std::string label;
    int comm_steps = 0;
    bool psi_passing = true;
    ElementProtocol protocol;
};

// A verification strategy: the averaged operator Omega = sum_l w_l T_l
// together with its mixture decomposition and named parameters.
struct Strategy {
    Mat4 op;
    StrategyClass cls = StrategyClass::Nonlocal;
    std::map<std::string, double> params;
    std::vector<std::pair<double, PovmElement>> mixture;
};

// --- one-way catalog -----------------------------------------------------

// The three one-shot tests:
//   X: initiator measures {|+>,|->}, responder projects on {v+, v-}
//   Y: initiator measures {|0>+-i|1>}/sqrt(2), responder projects on {w-, w+}
//   Z: both measure Z, accept on equal outcomes (op = diag(1,0,0,1))
// Direction BtoA exchanges the tensor factors (responder goes first).
PovmElement t_one_way(Basis which, double lambda, Direction dir = Direction::AtoB);

// Omega = (1-p)/2 T_X + (1-p)/2 T_Y + p T_Z. Eigen-decomposition:
// |psi><psi| + p |psi_perp><psi_perp| + (1-p)lambda |01><01|
//            + (1-p)(1-lambda) |10><10|   (for dir = AtoB; BtoA exchanges
// the roles of |01> and |10>).
Strategy omega_one_way(double lambda, double p, Direction dir = Direction::AtoB);

// Mixing probability of the Z test that equalizes the two competing
// eigenvalues: p* = (1-lambda)/(2-lambda).
double optimal_p_one_way(double lambda);

// Fair-coin average of the two directed strategies at p = 1/3:
// Omega_hat = |psi><psi| + (1/3)(1 - |psi><psi|); trace 2.
Strategy omega_hat_two_step(double lambda);

// --- three-step (two-way) catalog ----------------------------------------

// Damped variants of the X/Y tests (which must be X or Y):
//   T' = delta |0><0| x |0><0| + |v~+><v~+| x |+><+| + |v~-><v~-| x |-><-|
// (X case; the Y case pairs w~- with the +i outcome and w~+ with -i).
// Throws SingularDenominator at lambda = 0, delta = 1; callers special-case.
PovmElement t_two_way(Basis which, double lambda, double delta,
                      Direction dir = Direction::AtoB);

// Omega = (1-p)/4 (T'_X^{A->B} + T'_Y^{A->B} + T'_X^{B->A} + T'_Y^{B->A})
//         + p T_Z.
// Eigen-decomposition: |psi><psi| + l2 |psi_perp><psi_perp|
//                      + l3 (|01><01| + |10><10|) with
//   l2 = (p(1-delta) + lambda*delta) / (1-delta+lambda*delta)
//   l3 = (1-p)(lambda + (1-lambda)(1-delta)^2) / (2(1-delta+lambda*delta)).
// At lambda = 0 with (delta, p) = (1, 0) the strategy degenerates to the
// projective |00><00| test, returned directly.
Strategy omega_two_way(double lambda, double delta, double p);

struct TwoWayParams {
    double delta = 0, p = 0;
};

// Equalizing optimum: delta* = 1 - sqrt(lambda/(1-lambda)),
// p* = lambda / (1 + sqrt(lambda(1-lambda))). At lambda = 0: (1, 0).
TwoWayParams optimal_two_way_params(double lambda);

// --- separable / nonlocal catalog ----------------------------------------

// T4 = |psi><psi| + sqrt(lambda(1-lambda)) (|01><01| + |10><10|).
PovmElement t4_separable(double lambda);

// Homogeneous strategy |psi><psi| + delta (1 - |psi><psi|), delta in [0, 1).
Strategy omega_sep(double lambda, double delta);

// The entangled rank-one optimum |psi><psi|.
Strategy nonlocal_projector(double lambda);

// Second eigenvalue of the reference local-projective protocol:
// (2 + 2 sqrt(lambda(1-lambda))) / (4 + 2 sqrt(lambda(1-lambda))).
double plm_second_eigenvalue(double lambda);

// --- general one-way family ----------------------------------------------

// One atom of a measurement-direction distribution: weight on the direction
// parameterized by (t, s).
struct DirectionAtom {
    double weight = 0, t = 0, s = 0;
};

// Omega = 2 sum_i w_i |t_i,s_i><t_i,s_i| x |partner_i><partner_i|.
// Requires nonnegative weights summing to 1 (1e-12) and the mean constraint
// E[T] = 1/2 (1e-10, MeanConstraintViolated otherwise). The individual atoms
// have operator norm 2 and are flagged psi_passing = false; the twirled
// average of the assembled operator fixes the target state, the raw assembly
// in general does not.
Strategy one_way_general(double lambda, const std::vector<DirectionAtom>& atoms);

// --- validity helpers ------------------------------------------------------

// max(0, -min eig, max eig - 1): distance from the POVM-element order interval.
double povm_bounds_defect(const Mat4& op);

// || op |psi> - |psi> ||.
double psi_passing_defect(const Mat4& op, const TargetState& target);

// max-entry distance between op and the weighted sum of mixture elements.
double mixture_defect(const Strategy& s);

// sum of mixture weights (should be 1) and their minimum (should be >= 0).
double mixture_weight_sum(const Strategy& s);
double mixture_weight_min(const Strategy& s);

} // namespace qsv
