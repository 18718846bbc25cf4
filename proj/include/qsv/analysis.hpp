#pragma once

#include "qsv/states.hpp"

namespace qsv {

// Error/confidence targets for a verification run. Both lie in (0, 1).
struct VerificationSpec {
    double epsilon = 0.01;           // infidelity threshold to detect
    double confidence_delta = 0.001; // residual failure probability
};

// Throws InvalidRange unless both parameters lie strictly inside (0, 1).
void validate(const VerificationSpec& spec);

struct NumTests {
    long long n_exact = 0; // smallest n with (1 - (1-l2) eps)^n <= delta
    double n_approx = 0;   // first-order count ln(1/delta) / ((1-l2) eps)
};

struct AnalysisReport {
    double lambda2_down = 0; // second-largest eigenvalue of Omega
    double worst_pass = 0;   // max pass probability over eps-far states
    long long n_exact = 0;
    double n_approx = 0;
};

// Second-largest eigenvalue (descending order, multiplicity counted).
double second_largest(const Mat4& omega);

// max over states sigma with <psi|sigma|psi> <= 1 - eps of tr(Omega sigma)
// = 1 - (1 - lambda2) eps. Requires Omega to fix the target state
// (NotPsiPassing when || Omega psi - psi || > 1e-8) and eps in [0, 1].
double worst_case_pass(const Mat4& omega, const TargetState& target, double eps);

// A maximizing state: |w><w| with w = sqrt(1-eps) psi + sqrt(eps) phi,
// phi a unit vector of the second eigenspace orthogonal to psi. When the
// second eigenspace is degenerate the choice is deterministic: psi_perp is
// preferred, then |01>, then |10>, then the first eigenvector.
Mat4 worst_case_state(const Mat4& omega, const TargetState& target, double eps);

// Sample-size bound for a strategy with second eigenvalue lambda2.
// Throws DegenerateStrategy when lambda2 >= 1, InvalidRange when
// lambda2 < 0 or the spec is invalid. n_exact >= 1 always, and
// n_exact <= ceil(n_approx).
NumTests num_tests(double lambda2, const VerificationSpec& spec);

enum class TwirlMode { Analytic, Quadrature };

// Average of (U_theta x U_{-theta}) Omega (U_theta x U_{-theta})^dag over
// theta in [0, 2pi). The conjugation multiplies entry (i, j) by
// e^{i (phi_i - phi_j) theta} with phases (0, -1, +1, 0), so the average
// keeps the {|00>,|11>} block and the |01>, |10> diagonals and kills every
// cross-block entry. Analytic mode zeroes those entries directly;
// Quadrature mode integrates with the periodic trapezoid rule
// (quad_points nodes, default 1024).
Mat4 twirl(const Mat4& omega, TwirlMode mode = TwirlMode::Analytic,
           int quad_points = 1024);

// (Omega + S Omega S)/2 with S the qubit-exchange permutation.
Mat4 swap_symmetrize(const Mat4& omega);

// Bundles the quantities the command-line front end reports.
AnalysisReport analyze(const Mat4& omega, const TargetState& target,
                       const VerificationSpec& spec);

} // namespace qsv
