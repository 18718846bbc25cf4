#include "qsv/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "qsv/errors.hpp"

namespace qsv {

void validate(const VerificationSpec& spec) {
    if (!(spec.epsilon > 0.0) || !(spec.epsilon < 1.0)) {
        throw InvalidRange("epsilon must lie strictly inside (0, 1)");
    }
    if (!(spec.confidence_delta > 0.0) || !(spec.confidence_delta < 1.0)) {
        throw InvalidRange("confidence_delta must lie strictly inside (0, 1)");
    }
}

double second_largest(const Mat4& omega) {
    return eig_hermitian(omega).values[1];
}

namespace {

void require_psi_passing(const Mat4& omega, const TargetState& target) {
    const double defect = norm(omega * target.psi - target.psi);
    if (defect > 1e-8) {
        throw NotPsiPassing("operator does not fix the target state (defect " +
                            std::to_string(defect) + ")");
    }
}

} // namespace

double worst_case_pass(const Mat4& omega, const TargetState& target, double eps) {
    if (!(eps >= 0.0) || !(eps <= 1.0)) {
        throw InvalidRange("eps must lie in [0, 1]");
    }
    require_psi_passing(omega, target);
    return 1.0 - (1.0 - second_largest(omega)) * eps;
}

Mat4 worst_case_state(const Mat4& omega, const TargetState& target, double eps) {
    if (!(eps >= 0.0) || !(eps <= 1.0)) {
        throw InvalidRange("eps must lie in [0, 1]");
    }
    require_psi_passing(omega, target);

    const Spectrum4 spec = eig_hermitian(omega);
    const double lambda2 = spec.values[1];

    // Projector onto the eigenspace of the second-largest eigenvalue. The
    // target state is an eigenvector for eigenvalue ~1, so whenever
    // lambda2 < 1 this subspace is orthogonal to psi already; the explicit
    // projection below also covers the degenerate lambda2 ~ 1 case.
    Mat4 p2{};
    for (int k = 0; k < 4; ++k) {
        if (std::abs(spec.values[k] - lambda2) <= 1e-9) {
            p2 = p2 + outer(spec.vectors[k]);
        }
    }

    // Deterministic direction inside the eigenspace: prefer psi_perp, then
    // the antidiagonal basis states, then the solver's own eigenvector.
    std::vector<Ket4> seeds = {target.psi_perp,
                               Ket4{cplx(0), cplx(1), cplx(0), cplx(0)},
                               Ket4{cplx(0), cplx(0), cplx(1), cplx(0)},
                               spec.vectors[1]};
    Ket4 phi{};
    bool found = false;
    for (const Ket4& seed : seeds) {
        Ket4 cand = p2 * seed;
        cand = cand - dot(target.psi, cand) * target.psi;
        if (norm(cand) > 1e-6) {
            phi = normalized(cand);
            found = true;
            break;
        }
    }
    if (!found) {
        throw DegenerateStrategy("no admissible direction in the second eigenspace");
    }

    const Ket4 w = std::sqrt(1.0 - eps) * target.psi + std::sqrt(eps) * phi;
    return outer(normalized(w));
}

NumTests num_tests(double lambda2, const VerificationSpec& spec) {
    validate(spec);
    if (!(lambda2 >= 0.0)) {
        throw InvalidRange("lambda2 must be nonnegative");
    }
    if (lambda2 >= 1.0) {
        throw DegenerateStrategy("second eigenvalue at 1 gives no detection power");
    }
    const double gap = (1.0 - lambda2) * spec.epsilon;
    NumTests out;
    out.n_approx = std::log(1.0 / spec.confidence_delta) / gap;
    const double raw =
        std::log(spec.confidence_delta) / std::log1p(-gap);
    out.n_exact = std::max<long long>(1, static_cast<long long>(std::ceil(raw)));
    return out;
}

Mat4 twirl(const Mat4& omega, TwirlMode mode, int quad_points) {
    if (mode == TwirlMode::Analytic) {
        // Phase exponents (0, -1, +1, 0): entry (i, j) survives iff
        // phi_i == phi_j, i.e. both indices in {0, 3}, or i == j.
        Mat4 out{};
        out(0, 0) = omega(0, 0);
        out(0, 3) = omega(0, 3);
        out(3, 0) = omega(3, 0);
        out(3, 3) = omega(3, 3);
        out(1, 1) = omega(1, 1);
        out(2, 2) = omega(2, 2);
        return out;
    }
    if (quad_points < 2) {
        throw InvalidRange("quadrature needs at least two nodes");
    }
    // Periodic trapezoid rule on [0, 2pi): the two endpoint nodes coincide,
    // so the rule reduces to an equal-weight average over quad_points angles.
    Mat4 acc{};
    for (int k = 0; k < quad_points; ++k) {
        const double theta =
            2.0 * M_PI * static_cast<double>(k) / static_cast<double>(quad_points);
        const auto [ua, ub] = local_phase_unitary(theta);
        const Mat4 u4 = tensor(ua, ub);
        acc = acc + u4 * omega * adjoint(u4);
    }
    return (1.0 / static_cast<double>(quad_points)) * acc;
}

Mat4 swap_symmetrize(const Mat4& omega) {
    return 0.5 * (omega + exchange_qubits(omega));
}

AnalysisReport analyze(const Mat4& omega, const TargetState& target,
                       const VerificationSpec& spec) {
    AnalysisReport report;
    report.lambda2_down = second_largest(omega);
    report.worst_pass = worst_case_pass(omega, target, spec.epsilon);
    const NumTests n = num_tests(report.lambda2_down, spec);
    report.n_exact = n.n_exact;
    report.n_approx = n.n_approx;
    return report;
}

} // namespace qsv
