#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "qsv/analysis.hpp"
#include "qsv/errors.hpp"
#include "qsv/strategies.hpp"

using namespace qsv;

namespace {

std::mt19937_64 g_eng(20250818);

double uniform01() {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return u(g_eng);
}

cplx random_entry() {
    std::normal_distribution<double> gauss(0.0, 1.0);
    return {gauss(g_eng), gauss(g_eng)};
}

Mat4 random_hermitian() {
    Mat4 g{};
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) g(r, c) = random_entry();
    return 0.5 * (g + adjoint(g));
}

Ket4 random_unit_orthogonal_to(const Ket4& psi) {
    Ket4 v{};
    for (int i = 0; i < 4; ++i) v[i] = random_entry();
    v = v - dot(psi, v) * psi;
    return normalized(v);
}

// Direct search for the best boundary state: random starts plus power
// iteration of the psi-orthogonal compression of omega.
double brute_force_worst_pass(const Mat4& omega, const TargetState& t,
                              double eps) {
    double best = 0.0;
    const Mat4 proj_out = identity4() - outer(t.psi);
    for (int start = 0; start < 40; ++start) {
        Ket4 u = random_unit_orthogonal_to(t.psi);
        for (int it = 0; it < 200; ++it) {
            const Ket4 w = std::sqrt(1.0 - eps) * t.psi + std::sqrt(eps) * u;
            best = std::max(best, expectation(omega, normalized(w)));
            Ket4 next = proj_out * (omega * u);
            const double n = norm(next);
            if (n < 1e-14) break;
            u = (1.0 / n) * next;
        }
    }
    return best;
}

// A strategy that fixes the target but has generic spectrum elsewhere.
Mat4 random_passing_strategy(const TargetState& t) {
    const Mat4 h = random_hermitian();
    const Mat4 proj_out = identity4() - outer(t.psi);
    const Mat4 tail = proj_out * (h * h) * proj_out;
    const double top = eig_hermitian(tail).values[0];
    return outer(t.psi) + (0.9 / top) * tail;
}

} // namespace

TEST_CASE("second largest eigenvalue on explicit spectra") {
    Mat4 d{};
    d(0, 0) = 1.0;
    d(1, 1) = 0.25;
    d(2, 2) = 0.75;
    d(3, 3) = 0.5;
    CHECK(second_largest(d) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(second_largest(identity4()) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("worst-case pass probability matches the closed expression") {
    const TargetState t = make_target(0.25);
    for (double p : {0.1, 0.4, 0.9}) {
        const Strategy s = omega_one_way(0.25, p);
        const double l2 = second_largest(s.op);
        for (double eps : {0.0, 0.05, 0.3, 1.0}) {
            CHECK(worst_case_pass(s.op, t, eps) ==
                  doctest::Approx(1.0 - (1.0 - l2) * eps).epsilon(1e-13));
        }
    }
    CHECK_THROWS_AS(worst_case_pass(0.5 * outer(t.psi), t, 0.1), NotPsiPassing);
    CHECK_THROWS_AS(worst_case_pass(outer(t.psi), t, 1.5), InvalidRange);
    CHECK_THROWS_AS(worst_case_pass(outer(t.psi), t, -0.2), InvalidRange);
}

TEST_CASE("worst-case pass probability agrees with direct maximization") {
    const double eps = 0.13;
    for (double lambda : {0.1, 0.3}) {
        const TargetState t = make_target(lambda);
        std::vector<Mat4> ops = {
            omega_one_way(lambda, 0.35).op,
            omega_hat_two_step(lambda).op,
            omega_two_way(lambda, 0.4, 0.2).op,
            omega_sep(lambda, 0.45).op,
            random_passing_strategy(t),
        };
        for (const Mat4& op : ops) {
            const double closed = worst_case_pass(op, t, eps);
            const double brute = brute_force_worst_pass(op, t, eps);
            CHECK(brute <= closed + 1e-10);
            CHECK(closed - brute < 1e-6);
        }
    }
}

TEST_CASE("maximizing state: fidelity budget and achieved pass probability") {
    const double eps = 0.3;
    for (double lambda : {0.0, 0.25, 0.5}) {
        const TargetState t = make_target(lambda);
        std::vector<Mat4> ops = {
            omega_one_way(lambda, 0.5).op,
            omega_two_way(lambda, 0.4, 0.2).op,
            omega_sep(lambda, 0.3).op,
        };
        for (const Mat4& op : ops) {
            const Mat4 sigma = worst_case_state(op, t, eps);
            CHECK_NOTHROW(require_density_operator(sigma));
            CHECK(fidelity_with_pure(t.psi, sigma) ==
                  doctest::Approx(1.0 - eps).epsilon(1e-12));
            const double achieved = std::real(trace(op * sigma));
            CHECK(achieved == doctest::Approx(worst_case_pass(op, t, eps))
                                  .epsilon(1e-10));
        }
    }
}

TEST_CASE("maximizing state prefers deterministic directions on ties") {
    const double lambda = 0.25, eps = 0.3;
    const TargetState t = make_target(lambda);

    // Fully degenerate second eigenspace: psi_perp wins.
    const Mat4 sep = omega_sep(lambda, 0.4).op;
    const Ket4 w = std::sqrt(1.0 - eps) * t.psi + std::sqrt(eps) * t.psi_perp;
    CHECK(max_abs_diff(worst_case_state(sep, t, eps), outer(w)) < 1e-10);

    // Small p: the |10> eigenvalue dominates for the forward direction.
    const Mat4 fwd = omega_one_way(lambda, 0.05).op;
    Ket4 e10{};
    e10[2] = 1.0;
    const Ket4 w10 = std::sqrt(1.0 - eps) * t.psi + std::sqrt(eps) * e10;
    CHECK(max_abs_diff(worst_case_state(fwd, t, eps), outer(w10)) < 1e-10);
}

TEST_CASE("sample-size bound: pinned value and guarantee property") {
    const NumTests pinned = num_tests(1.0 / 3.0, {0.01, 0.001});
    CHECK(pinned.n_exact == 1033);
    CHECK(pinned.n_approx == doctest::Approx(std::log(1000.0) / (2.0 / 3.0 * 0.01))
                                 .epsilon(1e-12));

    // n_exact is the smallest count meeting the confidence target.
    std::mt19937_64 eng(777);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 300; ++rep) {
        const double l2 = u(eng);
        const double eps = 0.001 + 0.998 * u(eng);
        const double delta = 0.001 + 0.998 * u(eng);
        const NumTests nt = num_tests(l2, {eps, delta});
        const double rate = 1.0 - (1.0 - l2) * eps;
        CHECK(std::pow(rate, static_cast<double>(nt.n_exact)) <= delta + 1e-12);
        if (nt.n_exact > 1) {
            CHECK(std::pow(rate, static_cast<double>(nt.n_exact - 1)) >
                  delta * (1.0 - 1e-9));
        }
        CHECK(nt.n_exact <= static_cast<long long>(std::ceil(nt.n_approx)));
    }

    // A perfect strategy needs a single test even for loose targets.
    CHECK(num_tests(0.0, {0.5, 0.5}).n_exact == 1);
}

TEST_CASE("sample-size bound rejects degenerate or malformed input") {
    CHECK_THROWS_AS(num_tests(1.0, {0.01, 0.001}), DegenerateStrategy);
    CHECK_THROWS_AS(num_tests(1.5, {0.01, 0.001}), DegenerateStrategy);
    CHECK_THROWS_AS(num_tests(-0.1, {0.01, 0.001}), InvalidRange);
    CHECK_THROWS_AS(num_tests(0.5, {0.0, 0.001}), InvalidRange);
    CHECK_THROWS_AS(num_tests(0.5, {0.01, 1.0}), InvalidRange);
    CHECK_NOTHROW(validate(VerificationSpec{}));
}

TEST_CASE("phase averaging: closed form equals quadrature and is idempotent") {
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const Mat4 h = random_hermitian();
        const Mat4 a = twirl(h);
        const Mat4 q = twirl(h, TwirlMode::Quadrature, 1024);
        worst = std::max(worst, max_abs_diff(a, q));
        CHECK(max_abs_diff(twirl(a), a) < 1e-14);
        // The integrand is a trigonometric polynomial of degree two, so a
        // handful of equally spaced nodes already integrates it exactly.
        CHECK(max_abs_diff(a, twirl(h, TwirlMode::Quadrature, 4)) < 1e-13);
    }
    CHECK(worst < 1e-9);
    CHECK_THROWS_AS(twirl(identity4(), TwirlMode::Quadrature, 1),
                    InvalidRange);
}

TEST_CASE("phase averaging keeps the target fixed and never hurts efficiency") {
    const TargetState t = make_target(0.3);
    for (int rep = 0; rep < 100; ++rep) {
        const Mat4 op = random_passing_strategy(t);
        const Mat4 averaged = twirl(op);
        CHECK(norm(averaged * t.psi - t.psi) < 1e-10);
        CHECK(second_largest(averaged) <= second_largest(op) + 1e-10);
        CHECK(povm_bounds_defect(averaged) < 1e-9);
    }
}

TEST_CASE("exchange symmetrization averages the two directed strategies") {
    const double lambda = 0.25, p = 0.3;
    const Mat4 fwd = omega_one_way(lambda, p).op;
    const Mat4 bwd = omega_one_way(lambda, p, Direction::BtoA).op;
    const Mat4 sym = swap_symmetrize(fwd);
    CHECK(max_abs_diff(sym, 0.5 * (fwd + bwd)) < 1e-13);
    CHECK(max_abs_diff(sym, exchange_qubits(sym)) < 1e-14);
    // The off-diagonal residuals are averaged to a common value.
    CHECK(std::real(sym(1, 1)) == doctest::Approx(0.5 * (1.0 - p)).epsilon(1e-13));
    CHECK(std::real(sym(2, 2)) == doctest::Approx(0.5 * (1.0 - p)).epsilon(1e-13));
}

TEST_CASE("report bundle is consistent with its parts") {
    const TargetState t = make_target(0.25);
    const Strategy s = omega_one_way(0.25, optimal_p_one_way(0.25));
    const VerificationSpec spec{0.01, 0.001};
    const AnalysisReport r = analyze(s.op, t, spec);
    CHECK(r.lambda2_down == doctest::Approx(second_largest(s.op)).epsilon(1e-13));
    CHECK(r.worst_pass ==
          doctest::Approx(worst_case_pass(s.op, t, spec.epsilon)).epsilon(1e-13));
    const NumTests nt = num_tests(r.lambda2_down, spec);
    CHECK(r.n_exact == nt.n_exact);
    CHECK(r.n_approx == doctest::Approx(nt.n_approx).epsilon(1e-13));
}
