#include "qsv/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qsv/analysis.hpp"
#include "qsv/errors.hpp"

namespace qsv {

namespace {

void require_lambda(double lambda, const char* who) {
    if (!(lambda >= 0.0 && lambda <= 0.5)) {
        throw OutOfRangeLambda(std::string(who) + ": lambda must lie in [0, 1/2]");
    }
}

// Integrand t(1-t)/D with D = t(1-lambda) + (1-t)lambda. At lambda = 0 the
// quotient cancels to 1-t for t > 0 and extends by continuity to 0 at t = 0.
double xi_summand(double t, double lambda) {
    if (lambda == 0.0) return (t > 0.0) ? (1.0 - t) : 0.0;
    const double den = t * (1.0 - lambda) + (1.0 - t) * lambda;
    return t * (1.0 - t) / den;
}

} // namespace

void validate(const TDistribution& dist) {
    if (dist.atoms.empty()) {
        throw InvalidRange("tilt distribution needs at least one atom");
    }
    double sum = 0.0;
    double mean = 0.0;
    for (const TAtom& a : dist.atoms) {
        if (!(a.weight >= -1e-15)) {
            throw InvalidRange("tilt weights must be nonnegative");
        }
        if (!(a.t >= 0.0 && a.t <= 1.0)) {
            throw InvalidRange("tilt parameter must lie in [0, 1]");
        }
        sum += a.weight;
        mean += a.weight * a.t;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw InvalidRange("tilt weights must sum to 1");
    }
    if (std::abs(mean - 0.5) > 1e-10) {
        throw MeanConstraintViolated("tilt distribution must have mean 1/2, got " +
                                     std::to_string(mean));
    }
}

XiFunctional xi_of(const TDistribution& dist, double lambda) {
    require_lambda(lambda, "xi_of");
    validate(dist);
    double xi = 0.0;
    for (const TAtom& a : dist.atoms) xi += a.weight * xi_summand(a.t, lambda);
    xi *= 2.0;
    XiFunctional out;
    out.xi = xi;
    out.lambda2 = 1.0 - xi;
    out.lambda3 = xi * lambda;
    out.lambda4 = xi * (1.0 - lambda);
    return out;
}

std::pair<double, double> povm_identity_residuals(const TDistribution& dist,
                                                  double lambda) {
    require_lambda(lambda, "povm_identity_residuals");
    validate(dist);
    const double xi = xi_of(dist, lambda).xi;
    double s1 = 0.0; // E[ T^2 (1-lambda) / D ], lambda folded before cancelling
    double s2 = 0.0; // E[ (1-T)^2 lambda / D ]
    for (const TAtom& a : dist.atoms) {
        if (lambda == 0.0) {
            s1 += a.weight * a.t;                  // t^2/D -> t as D -> t
            s2 += (a.t == 0.0) ? a.weight : 0.0;   // lambda(1-t)^2/D -> 1{t=0}
        } else {
            const double den = a.t * (1.0 - lambda) + (1.0 - a.t) * lambda;
            s1 += a.weight * a.t * a.t * (1.0 - lambda) / den;
            s2 += a.weight * (1.0 - a.t) * (1.0 - a.t) * lambda / den;
        }
    }
    const double lhs1 = 2.0 * s1 + lambda * xi;
    const double lhs2 = 2.0 * s2 + (1.0 - lambda) * xi;
    return {std::abs(lhs1 - 1.0), std::abs(lhs2 - 1.0)};
}

OptimalityCertificate one_way_oracle(double lambda, int grid) {
    require_lambda(lambda, "one_way_oracle");
    if (grid < 2) throw InvalidRange("one_way_oracle: grid must be >= 2");

    const double closed = (1.0 - lambda) / (2.0 - lambda);
    double best = std::numeric_limits<double>::infinity();
    double best_t1 = 0.5, best_t2 = 0.5, best_w = 1.0, best_xi = 0.0;

    const double step = 0.5 / static_cast<double>(grid - 1);
    for (int i = 0; i < grid; ++i) {
        const double t1 = 0.5 + step * static_cast<double>(i);
        const double f1 = xi_summand(t1, lambda);
        for (int j = 0; j < grid; ++j) {
            const double t2 = step * static_cast<double>(j);
            // weight on t1 that pins the mean at 1/2; the degenerate pair
            // t1 = t2 = 1/2 is the single-atom distribution.
            const double w = (t1 - t2 > 1e-15) ? (0.5 - t2) / (t1 - t2) : 1.0;
            const double xi =
                2.0 * (w * f1 + (1.0 - w) * xi_summand(t2, lambda));
            const double l2 = std::max(1.0 - xi, xi * (1.0 - lambda));
            if (l2 < best) {
                best = l2;
                best_t1 = t1;
                best_t2 = t2;
                best_w = w;
                best_xi = xi;
            }
        }
    }

    OptimalityCertificate cert;
    cert.claim = "one_way_optimum";
    cert.closed_form = closed;
    cert.oracle_value = best;
    cert.gap = std::abs(closed - best);
    cert.grid_resolution = static_cast<double>(grid);
    cert.tolerance = 1e-4;
    cert.details = {{"t1", best_t1},
                    {"t2", best_t2},
                    {"weight", best_w},
                    {"xi", best_xi},
                    {"undercut", std::max(0.0, closed - best)}};
    cert.passed = cert.gap <= cert.tolerance && best >= closed - 1e-9;
    return cert;
}

namespace {

// den = 1 - delta + lambda delta vanishes only at lambda = 0, delta = 1.
double l2_closed(double lambda, double delta, double p) {
    return (p * (1.0 - delta) + lambda * delta) / (1.0 - delta + lambda * delta);
}

double l3_closed(double lambda, double delta, double p) {
    const double u = 1.0 - delta;
    return (1.0 - p) * (lambda + (1.0 - lambda) * u * u) /
           (2.0 * (u + lambda * delta));
}

double second_eig_closed(double lambda, double delta, double p) {
    const double den = 1.0 - delta + lambda * delta;
    if (den <= 1e-15) {
        // Only the projective corner survives the singular denominator.
        return (lambda == 0.0 && delta == 1.0 && p == 0.0)
                   ? 0.0
                   : std::numeric_limits<double>::infinity();
    }
    return std::max(l2_closed(lambda, delta, p), l3_closed(lambda, delta, p));
}

// Mixing probability that equalizes l2 and l3 at fixed delta (may fall
// outside [0, 1] for large delta, where no crossing exists).
double equalizing_p(double lambda, double delta) {
    const double u = 1.0 - delta;
    const double c = lambda + (1.0 - lambda) * u * u;
    return (c - 2.0 * lambda * delta) / (2.0 * u + c);
}

// Second eigenvalue along the equalized curve, with the lambda = 0,
// delta = 1 endpoint taken by continuity.
double equalized_level(double lambda, double delta) {
    if (lambda == 0.0 && delta == 1.0) return 0.0;
    const double p = std::clamp(equalizing_p(lambda, delta), 0.0, 1.0);
    return second_eig_closed(lambda, delta, p);
}

} // namespace

OptimalityCertificate two_way_grid_search(double lambda, int grid) {
    require_lambda(lambda, "two_way_grid_search");
    if (grid < 2) throw InvalidRange("two_way_grid_search: grid must be >= 2");

    const double root = std::sqrt(lambda * (1.0 - lambda));
    const double closed = root / (1.0 + root);
    const TwoWayParams star = optimal_two_way_params(lambda);

    double best = std::numeric_limits<double>::infinity();
    double best_d = 0.0, best_p = 0.0;
    double d_lo = 0.0, d_hi = 1.0, p_lo = 0.0, p_hi = 1.0;

    // One full pass plus three zoomed passes. A single uniform mesh leaves
    // value gaps above 1e-5 and argmin gaps above 2e-3 at grid = 1000; each
    // zoom shrinks the window to +-50 cells around the incumbent (clipped to
    // the unit square, so coarse grids degenerate to repeating the full
    // pass and the refinement is a no-op for them).
    for (int pass = 0; pass < 4; ++pass) {
        const double d_step = (d_hi - d_lo) / static_cast<double>(grid - 1);
        const double p_step = (p_hi - p_lo) / static_cast<double>(grid - 1);
        for (int i = 0; i < grid; ++i) {
            const double d = d_lo + d_step * static_cast<double>(i);
            for (int j = 0; j < grid; ++j) {
                const double p = p_lo + p_step * static_cast<double>(j);
                const double f = second_eig_closed(lambda, d, p);
                if (f < best) {
                    best = f;
                    best_d = d;
                    best_p = p;
                }
            }
        }
        const double half_d = 50.0 * d_step;
        const double half_p = 50.0 * p_step;
        d_lo = std::max(0.0, best_d - half_d);
        d_hi = std::min(1.0, best_d + half_d);
        p_lo = std::max(0.0, best_p - half_p);
        p_hi = std::min(1.0, best_p + half_p);
    }

    // Closed-form cross checks along the equalized curve.
    double eq_err = 0.0;
    for (int k = 0; k <= 20; ++k) {
        const double d = (k == 20) ? star.delta : 0.05 * static_cast<double>(k);
        const double den = 1.0 - d + lambda * d;
        if (den <= 1e-12) continue;
        const double p = equalizing_p(lambda, d);
        if (p < 0.0 || p > 1.0) continue;
        eq_err = std::max(eq_err, std::abs(l2_closed(lambda, d, p) -
                                           l3_closed(lambda, d, p)));
    }

    // The benchmark delta must be a strict local minimum of the equalized
    // level (the derivative changes sign from - to + across it).
    const double h = 1e-3;
    const double g_star = (lambda == 0.0) ? closed : equalized_level(lambda, star.delta);
    bool local_min = true;
    if (star.delta - h >= 0.0) {
        local_min = local_min && equalized_level(lambda, star.delta - h) > g_star;
    }
    if (star.delta + h <= 1.0) {
        local_min = local_min && equalized_level(lambda, star.delta + h) > g_star;
    }

    OptimalityCertificate cert;
    cert.claim = "two_way_optimum";
    cert.closed_form = closed;
    cert.oracle_value = best;
    cert.gap = std::abs(closed - best);
    cert.grid_resolution = static_cast<double>(grid);
    cert.tolerance = 1e-5;
    const double argmin_err =
        std::max(std::abs(best_d - star.delta), std::abs(best_p - star.p));
    cert.details = {{"delta_argmin", best_d},
                    {"p_argmin", best_p},
                    {"delta_star", star.delta},
                    {"p_star", star.p},
                    {"argmin_err", argmin_err},
                    {"argmin_tolerance", 2e-3},
                    {"equalization_max_err", eq_err},
                    {"local_min_ok", local_min ? 1.0 : 0.0},
                    {"undercut", std::max(0.0, closed - best)}};
    cert.passed = cert.gap <= cert.tolerance && argmin_err <= 2e-3 &&
                  eq_err <= 1e-10 && local_min && best >= closed - 1e-9;
    return cert;
}

namespace {

bool ppt_feasible(double lambda, double delta) {
    const Mat4 om = omega_sep(lambda, delta).op;
    return eig_hermitian(partial_transpose_b(om)).values[3] >= -1e-12;
}

double transpose_eig_error(double lambda, double delta) {
    const double root = std::sqrt(lambda * (1.0 - lambda));
    std::array<double, 4> closed = {1.0 - lambda + lambda * delta,
                                    lambda + delta - lambda * delta,
                                    delta + (1.0 - delta) * root,
                                    delta - (1.0 - delta) * root};
    std::sort(closed.begin(), closed.end(), std::greater<double>());
    const Spectrum4 s =
        eig_hermitian(partial_transpose_b(omega_sep(lambda, delta).op));
    double err = 0.0;
    for (int k = 0; k < 4; ++k) err = std::max(err, std::abs(closed[k] - s.values[k]));
    return err;
}

} // namespace

OptimalityCertificate ppt_min_delta(double lambda, double tol) {
    require_lambda(lambda, "ppt_min_delta");
    if (!(tol > 0.0)) throw InvalidRange("ppt_min_delta: tol must be positive");

    const double root = std::sqrt(lambda * (1.0 - lambda));
    const double closed = root / (1.0 + root);

    // Bisection: delta = 1 is the identity (feasible, never evaluated);
    // delta = 0 is the rank-one projector, infeasible unless lambda = 0.
    double threshold = 0.0;
    int steps = 0;
    if (!ppt_feasible(lambda, 0.0)) {
        double lo = 0.0, hi = 1.0;
        while (hi - lo > 0.5 * tol) {
            const double mid = 0.5 * (lo + hi);
            (ppt_feasible(lambda, mid) ? hi : lo) = mid;
            ++steps;
        }
        threshold = 0.5 * (lo + hi);
    }

    double eig_err = 0.0;
    for (const double d : {0.0, 0.25, 0.5, 0.75, threshold}) {
        eig_err = std::max(eig_err, transpose_eig_error(lambda, d));
    }

    // Feasibility must genuinely flip across the threshold. The probe below
    // the threshold leaves [0, 1) at lambda = 0; the raw form
    // psi psi^dag + delta (1 - psi psi^dag) still makes sense there and is
    // what the flip is about, so probe it directly.
    const TargetState target = make_target(lambda);
    const auto raw_feasible = [&](double d) {
        const Mat4 om = outer(target.psi) + d * (identity4() - outer(target.psi));
        return eig_hermitian(partial_transpose_b(om)).values[3] >= -1e-12;
    };
    const bool flip_ok =
        raw_feasible(threshold + 1e-6) && !raw_feasible(threshold - 1e-6);

    OptimalityCertificate cert;
    cert.claim = "ppt_threshold";
    cert.closed_form = closed;
    cert.oracle_value = threshold;
    cert.gap = std::abs(closed - threshold);
    cert.grid_resolution = static_cast<double>(steps);
    cert.tolerance = std::max(tol, 1e-12);
    cert.details = {{"eig_max_err", eig_err},
                    {"flip_ok", flip_ok ? 1.0 : 0.0}};
    cert.passed = cert.gap <= cert.tolerance && eig_err <= 1e-10 && flip_ok;
    return cert;
}

HomogenizedForm homogenize(const Mat4& op, double lambda) {
    require_lambda(lambda, "homogenize");
    const TargetState target = make_target(lambda);

    const double top = std::real(expectation(op, target.psi));
    const double l2 = std::real(expectation(op, target.psi_perp));
    const double l3 = 0.5 * std::real(op(1, 1) + op(2, 2));

    Mat4 model = top * outer(target.psi) + l2 * outer(target.psi_perp);
    model(1, 1) += l3;
    model(2, 2) += l3;
    const double residual = frobenius(op - model);
    if (residual > 1e-8) {
        throw NotSymmetrizedForm(
            "operator is not in the twirled swap-symmetric block form "
            "(residual " +
            std::to_string(residual) + ")");
    }
    if (std::abs(top - 1.0) > 1e-8) {
        throw NotPsiPassing("block form must carry eigenvalue 1 on the target state");
    }

    const double root = std::sqrt(lambda * (1.0 - lambda));
    HomogenizedForm out;
    if (l2 > l3) {
        // Raise the antidiagonal levels with the separable T4 test.
        const double w = (l2 - l3) / (l2 - l3 + root);
        out.op = (1.0 - w) * op + w * t4_separable(lambda).op;
        out.mixing_weight = w;
    } else {
        // Raise the psi_perp level with the correlated Z test.
        const double w = (l3 - l2) / (1.0 - l2 + l3);
        out.op =
            (1.0 - w) * op + w * t_one_way(Basis::Z, lambda, Direction::AtoB).op;
        out.mixing_weight = w;
    }
    out.level = std::real(expectation(out.op, target.psi_perp));
    return out;
}

} // namespace qsv
