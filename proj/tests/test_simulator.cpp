#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "qsv/analysis.hpp"
#include "qsv/errors.hpp"
#include "qsv/simulator.hpp"

using namespace qsv;

namespace {

Mat4 random_density(std::mt19937_64& eng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Mat4 g{};
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) g(r, c) = cplx(gauss(eng), gauss(eng));
    const Mat4 w = g * adjoint(g);
    return (1.0 / std::real(trace(w))) * w;
}

double born_probability(const Mat4& op, const Mat4& sigma) {
    return std::clamp(std::real(trace(op * sigma)), 0.0, 1.0);
}

} // namespace

TEST_CASE("substreams are reproducible and well separated") {
    const std::uint64_t a = substream_seed(12345, 0);
    CHECK(a == substream_seed(12345, 0));
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 4096; ++i) seen.insert(substream_seed(12345, i));
    CHECK(seen.size() == 4096);
    CHECK(substream_seed(12345, 7) != substream_seed(54321, 7));
}

TEST_CASE("uniform draws stay in the half-open unit interval") {
    Rng rng(substream_seed(1, 1));
    double lo = 1.0, hi = -1.0;
    for (int i = 0; i < 100000; ++i) {
        const double x = rng.uniform();
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    CHECK(lo >= 0.0);
    CHECK(hi < 1.0);
    CHECK(lo < 0.01);
    CHECK(hi > 0.99);
}

TEST_CASE("near-certain coin flips are exact") {
    Rng rng(99);
    for (int i = 0; i < 1000; ++i) {
        CHECK(rng.bernoulli(1.0));
        CHECK(rng.bernoulli(1.0 - 1e-16));
        CHECK(!rng.bernoulli(0.0));
        CHECK(!rng.bernoulli(1e-16));
    }
}

TEST_CASE("weighted pick matches its distribution") {
    Rng rng(substream_seed(31337, 5));
    const std::vector<double> w = {0.5, 0.2, 0.3};
    std::vector<int> counts(3, 0);
    const int n = 200000;
    for (int i = 0; i < n; ++i) ++counts[rng.pick(w)];
    for (int k = 0; k < 3; ++k) {
        const double se = std::sqrt(w[k] * (1.0 - w[k]) / n);
        CHECK(std::abs(counts[k] / static_cast<double>(n) - w[k]) < 5.0 * se);
    }
    CHECK_THROWS_AS(rng.pick({}), InvalidRange);
}

TEST_CASE("device factories produce the states they promise") {
    const TargetState t = make_target(0.25);
    Rng rng(1);

    const DeviceModel honest = honest_device(t);
    CHECK(max_abs_diff(honest.emit(rng), outer(t.psi)) < 1e-14);

    const double eps = 0.2;
    const Mat4 omega = omega_one_way(0.25, 0.4).op;
    const DeviceModel worst = worst_case_device(omega, t, eps);
    CHECK(fidelity_with_pure(t.psi, worst.emit(rng)) ==
          doctest::Approx(1.0 - eps).epsilon(1e-10));

    std::mt19937_64 eng(5);
    const Mat4 rho = random_density(eng);
    const DeviceModel fixed = fixed_device(rho);
    CHECK(max_abs_diff(fixed.mean_state(), rho) < 1e-14);

    Mat4 junk{};
    junk(0, 1) = 2.0;
    CHECK_THROWS_AS(fixed_device(junk), NonHermitianInput);
    Mat4 doubled = 2.0 * rho;
    CHECK_THROWS_AS(fixed_device(doubled), InvalidDensityOperator);

    const Mat4 rho2 = random_density(eng);
    const DeviceModel mix = mixture_device({{0.25, rho}, {0.75, rho2}});
    CHECK(max_abs_diff(mix.mean_state(), 0.25 * rho + 0.75 * rho2) < 1e-14);
    CHECK_THROWS_AS(mixture_device({{0.5, rho}, {0.2, rho2}}), InvalidRange);
    CHECK_THROWS_AS(mixture_device({{-0.2, rho}, {1.2, rho2}}), InvalidRange);
    CHECK_THROWS_AS(mixture_device({}), InvalidRange);
}

TEST_CASE("every protocol element reproduces its Born-rule acceptance") {
    const double lambda = 0.3;
    const TargetState t = make_target(lambda);
    std::mt19937_64 eng(2024);
    std::vector<Mat4> sigmas = {random_density(eng), random_density(eng),
                                random_density(eng)};

    std::vector<Strategy> strategies = {
        omega_one_way(lambda, 0.35),
        omega_one_way(lambda, 0.35, Direction::BtoA),
        omega_hat_two_step(lambda),
        omega_two_way(lambda, 0.45, 0.25),
        omega_sep(lambda, 0.3),
        nonlocal_projector(lambda),
    };
    const int trials = 20000;
    std::uint64_t stream = 0;
    for (const Strategy& s : strategies) {
        for (const auto& [w, element] : s.mixture) {
            for (const Mat4& sigma : sigmas) {
                int hits = 0;
                for (int k = 0; k < trials; ++k) {
                    Rng rng(substream_seed(771177, stream * trials + k));
                    if (run_element_trial(element, t, sigma, rng).accepted)
                        ++hits;
                }
                ++stream;
                const double want = born_probability(element.op, sigma);
                const double got = hits / static_cast<double>(trials);
                const double se =
                    std::sqrt(std::max(want * (1.0 - want) / trials, 1e-12));
                CHECK(std::abs(got - want) < 5.0 * se + 1e-9);
            }
        }
    }
}

TEST_CASE("an honest source is accepted on every single trial") {
    const double lambda = 0.25;
    const TargetState t = make_target(lambda);
    const Mat4 psi = outer(t.psi);
    for (int k = 0; k < 1000; ++k) {
        Rng rng(substream_seed(8080, k));
        CHECK(run_one_way_trial(lambda, 0.4, psi, rng).accepted);
        CHECK(run_one_way_trial(lambda, 0.4, psi, rng, Direction::BtoA).accepted);
        CHECK(run_two_way_trial(lambda, 0.45, 0.2, psi, rng).accepted);
    }
}

TEST_CASE("trial transcripts respect the protocols' communication budgets") {
    const double lambda = 0.3;
    const TargetState t = make_target(lambda);
    std::mt19937_64 eng(11);
    const Mat4 sigma = random_density(eng);

    std::size_t min_fwd = 99, max_fwd = 0, min_bwd = 99, max_bwd = 0;
    for (int k = 0; k < 4000; ++k) {
        Rng rng(substream_seed(5001, k));
        const TrialRecord one = run_one_way_trial(lambda, 0.3, sigma, rng);
        CHECK(one.transcript.size() == 1);
        CHECK(!one.element_label.empty());

        const PovmElement damped_fwd = t_two_way(Basis::X, lambda, 0.4);
        const auto fwd = run_element_trial(damped_fwd, t, sigma, rng).transcript.size();
        min_fwd = std::min(min_fwd, fwd);
        max_fwd = std::max(max_fwd, fwd);

        const PovmElement damped_bwd =
            t_two_way(Basis::Y, lambda, 0.4, Direction::BtoA);
        const auto bwd = run_element_trial(damped_bwd, t, sigma, rng).transcript.size();
        min_bwd = std::min(min_bwd, bwd);
        max_bwd = std::max(max_bwd, bwd);
    }
    // Forward damped tests: 1 message when the damping click decides,
    // 2 when the conditional basis round runs; reversed ones always open
    // with a notice. Everything stays within the 3-message budget.
    CHECK(min_fwd == 1);
    CHECK(max_fwd == 2);
    CHECK(min_bwd == 2);
    CHECK(max_bwd == 3);

    for (const auto& [w, e] : omega_hat_two_step(lambda).mixture) {
        Rng rng(substream_seed(6002, static_cast<std::uint64_t>(w * 1e6)));
        CHECK(run_element_trial(e, t, sigma, rng).transcript.size() == 2);
    }
}

TEST_CASE("campaign statistics match the worst-case prediction") {
    const double lambda = 0.25, eps = 0.1;
    const TargetState t = make_target(lambda);
    const auto [delta, p] = optimal_two_way_params(lambda);
    const Strategy s = omega_two_way(lambda, delta, p);
    const DeviceModel dev = worst_case_device(s.op, t, eps);
    const VerificationReport r = run_campaign(s, t, dev, 1, 100000, 31415);

    const double l2 = second_largest(s.op);
    const double want = 1.0 - (1.0 - l2) * eps;
    CHECK(r.predicted_rate == doctest::Approx(want).epsilon(1e-10));
    CHECK(std::abs(r.empirical_rate - r.predicted_rate) <
          5.0 * r.std_error + 1e-12);
    CHECK(r.trials == 100000);
    CHECK(r.accepts <= r.trials);
    CHECK(r.std_error ==
          doctest::Approx(std::sqrt(r.empirical_rate * (1.0 - r.empirical_rate) /
                                    r.trials))
              .epsilon(1e-12));
}

TEST_CASE("campaigns are invariant under the thread count") {
    const double lambda = 0.3;
    const TargetState t = make_target(lambda);
    const Strategy s = omega_one_way(lambda, 0.4);
    const DeviceModel dev = worst_case_device(s.op, t, 0.15);
    const VerificationReport serial = run_campaign(s, t, dev, 1, 30000, 777, 1);
    const VerificationReport parallel = run_campaign(s, t, dev, 1, 30000, 777, 4);
    CHECK(serial.accepts == parallel.accepts);
    const VerificationReport reseeded = run_campaign(s, t, dev, 1, 30000, 778, 4);
    CHECK(reseeded.accepts != serial.accepts);
}

TEST_CASE("multi-test rounds compound the per-test rate") {
    const double lambda = 0.25, eps = 0.1;
    const TargetState t = make_target(lambda);
    const Strategy s = omega_hat_two_step(lambda);
    const DeviceModel dev = worst_case_device(s.op, t, eps);
    const int n_tests = 50;
    const VerificationReport r = run_campaign(s, t, dev, n_tests, 100000, 2718);
    const double per_test = 1.0 - (1.0 - second_largest(s.op)) * eps;
    CHECK(r.predicted_rate ==
          doctest::Approx(std::pow(per_test, n_tests)).epsilon(1e-10));
    CHECK(std::abs(r.empirical_rate - r.predicted_rate) <
          5.0 * r.std_error + 1e-12);
}

TEST_CASE("the prescribed sample size actually suppresses the worst case") {
    const double lambda = 0.25, eps = 0.05, conf = 0.01;
    const TargetState t = make_target(lambda);
    const auto [delta, p] = optimal_two_way_params(lambda);
    const Strategy s = omega_two_way(lambda, delta, p);
    const NumTests nt = num_tests(second_largest(s.op), {eps, conf});
    const DeviceModel dev = worst_case_device(s.op, t, eps);
    const VerificationReport r = run_campaign(
        s, t, dev, static_cast<int>(nt.n_exact), 100000, 161803);
    CHECK(r.empirical_rate <= conf + 5.0 * r.std_error + 1e-9);
    CHECK(r.predicted_rate <= conf);
}

TEST_CASE("degenerate corner runs as a plain projective test") {
    const TargetState t = make_target(0.0);
    const Strategy s = omega_two_way(0.0, 1.0, 0.0);
    const double eps = 0.3;
    const DeviceModel dev = worst_case_device(s.op, t, eps);
    const VerificationReport r = run_campaign(s, t, dev, 1, 50000, 4096);
    CHECK(r.predicted_rate == doctest::Approx(1.0 - eps).epsilon(1e-12));
    CHECK(std::abs(r.empirical_rate - r.predicted_rate) <
          5.0 * r.std_error + 1e-12);

    const DeviceModel honest = honest_device(t);
    const VerificationReport h = run_campaign(s, t, honest, 3, 20000, 4097);
    CHECK(h.empirical_rate == 1.0);
}

TEST_CASE("honest campaigns accept with certainty across the catalog") {
    for (double lambda : {0.0, 0.25, 0.5}) {
        const TargetState t = make_target(lambda);
        const DeviceModel dev = honest_device(t);
        std::vector<Strategy> strategies = {
            omega_one_way(lambda, optimal_p_one_way(lambda)),
            omega_hat_two_step(lambda),
            omega_sep(lambda, 0.4),
            nonlocal_projector(lambda),
        };
        const auto [delta, p] = optimal_two_way_params(lambda);
        strategies.push_back(omega_two_way(lambda, delta, p));
        for (const Strategy& s : strategies) {
            const VerificationReport r = run_campaign(s, t, dev, 2, 20000, 555);
            CHECK(r.empirical_rate == 1.0);
            CHECK(r.predicted_rate == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("simulation entry points validate their inputs") {
    const TargetState t = make_target(0.25);
    Rng rng(3);
    Mat4 junk{};
    junk(0, 0) = 0.7; // trace != 1
    CHECK_THROWS_AS(run_one_way_trial(0.25, 0.3, junk, rng),
                    InvalidDensityOperator);
    CHECK_THROWS_AS(run_two_way_trial(0.25, 0.4, 0.3, junk, rng),
                    InvalidDensityOperator);

    const Strategy s = omega_one_way(0.25, 0.3);
    const DeviceModel dev = honest_device(t);
    CHECK_THROWS_AS(run_campaign(s, t, dev, 0, 100, 1), InvalidRange);
    CHECK_THROWS_AS(run_campaign(s, t, dev, 1, 0, 1), InvalidRange);
}
