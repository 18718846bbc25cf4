#include <cstdio>
#include <cstdint>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qsv/analysis.hpp"
#include "qsv/errors.hpp"
#include "qsv/oracles.hpp"
#include "qsv/simulator.hpp"

using nlohmann::json;

namespace {

const std::vector<std::string> kAllStrategies = {"one_way", "two_step", "two_way",
                                                 "sep",     "plm",      "nonlocal"};

struct StrategyOverrides {
    bool has_delta = false;
    double delta = 0;
    bool has_p = false;
    double p = 0;
};

// Builds the named strategy at its optimal parameters unless the caller
// pinned delta/p explicitly. "plm" is a reference curve without an
// operator realization and is rejected here.
qsv::Strategy build_strategy(const std::string& name, double lambda,
                             const StrategyOverrides& ov = {}) {
    if (name == "one_way") {
        const double p = ov.has_p ? ov.p : qsv::optimal_p_one_way(lambda);
        return qsv::omega_one_way(lambda, p);
    }
    if (name == "two_step") return qsv::omega_hat_two_step(lambda);
    if (name == "two_way") {
        qsv::TwoWayParams tw = qsv::optimal_two_way_params(lambda);
        if (ov.has_delta) tw.delta = ov.delta;
        if (ov.has_p) tw.p = ov.p;
        return qsv::omega_two_way(lambda, tw.delta, tw.p);
    }
    if (name == "sep") {
        const double root = std::sqrt(lambda * (1.0 - lambda));
        const double delta = ov.has_delta ? ov.delta : root / (1.0 + root);
        return qsv::omega_sep(lambda, delta);
    }
    if (name == "nonlocal") return qsv::nonlocal_projector(lambda);
    throw qsv::UnknownStrategy(
        "unknown strategy '" + name +
        "' (choose from one_way, two_step, two_way, sep, nonlocal; 'plm' is a "
        "reference curve with no protocol realization)");
}

// Second eigenvalue of the named strategy at its optimal parameters.
// Unlike build_strategy this accepts "plm", which exists only as a curve.
double lambda2_of(const std::string& name, double lambda) {
    if (name == "plm") return qsv::plm_second_eigenvalue(lambda);
    if (std::find(kAllStrategies.begin(), kAllStrategies.end(), name) ==
        kAllStrategies.end()) {
        throw qsv::UnknownStrategy("unknown strategy '" + name +
                                   "' (choose from one_way, two_step, two_way, "
                                   "sep, plm, nonlocal)");
    }
    return qsv::second_largest(build_strategy(name, lambda).op);
}

qsv::Mat4 read_device_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw qsv::InvalidRange("cannot open device file '" + path + "'");
    json j = json::parse(in);
    if (!j.is_array() || j.size() != 4) {
        throw qsv::InvalidRange("device file must hold a 4x4 matrix");
    }
    qsv::Mat4 rho{};
    for (int r = 0; r < 4; ++r) {
        if (!j[r].is_array() || j[r].size() != 4) {
            throw qsv::InvalidRange("device file must hold a 4x4 matrix");
        }
        for (int c = 0; c < 4; ++c) {
            const json& cell = j[r][c];
            if (!cell.is_array() || cell.size() != 2) {
                throw qsv::InvalidRange(
                    "device file entries must be [re, im] pairs");
            }
            rho(r, c) = qsv::cplx(cell[0].get<double>(), cell[1].get<double>());
        }
    }
    return rho;
}

// Writes text to the chosen sink (stdout when no path given).
void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::fputs(text.c_str(), stdout);
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw qsv::InvalidRange("cannot write to '" + out_path + "'");
    out << text;
}

std::string fmt9(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

json certificate_to_json(const qsv::OptimalityCertificate& c) {
    json d = json::object();
    for (const auto& [k, v] : c.details) d[k] = v;
    return json{{"claim", c.claim},
                {"closed_form", c.closed_form},
                {"oracle_value", c.oracle_value},
                {"gap", c.gap},
                {"grid_resolution", c.grid_resolution},
                {"tolerance", c.tolerance},
                {"passed", c.passed},
                {"details", d}};
}

// ---------------------------------------------------------------- sweep ---

int cmd_sweep(double lo, double hi, int steps,
              const std::vector<std::string>& strategies, double epsilon,
              double confidence, const std::string& out_path) {
    if (!(lo >= 0.0 && lo <= hi && hi <= 0.5)) {
        throw qsv::InvalidRange("sweep needs 0 <= lambda-min <= lambda-max <= 1/2");
    }
    if (steps < 2) throw qsv::InvalidRange("sweep needs at least 2 steps");
    for (const std::string& s : strategies) {
        if (std::find(kAllStrategies.begin(), kAllStrategies.end(), s) ==
            kAllStrategies.end()) {
            throw qsv::UnknownStrategy("unknown strategy '" + s + "'");
        }
    }
    const qsv::VerificationSpec spec{epsilon, confidence};
    std::string text = "lambda,strategy,lambda2,n_approx\n";
    for (int i = 0; i < steps; ++i) {
        const double lambda =
            lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
        for (const std::string& name : strategies) {
            const double l2 = lambda2_of(name, lambda);
            const double n_approx = qsv::num_tests(l2, spec).n_approx;
            text += fmt9(lambda) + "," + name + "," + fmt9(l2) + "," +
                    fmt9(n_approx) + "\n";
        }
    }
    emit(out_path, text);
    return 0;
}

// -------------------------------------------------------------- certify ---

int cmd_certify(double lambda, int grid, double tol, const std::string& out_path) {
    const qsv::OptimalityCertificate certs[] = {
        qsv::one_way_oracle(lambda, grid),
        qsv::two_way_grid_search(lambda, grid),
        qsv::ppt_min_delta(lambda, tol),
    };
    bool all_passed = true;
    json arr = json::array();
    for (const auto& c : certs) {
        all_passed = all_passed && c.passed;
        arr.push_back(certificate_to_json(c));
    }
    const json report{{"config", json{{"command", "certify"},
                                      {"lambda", lambda},
                                      {"grid", grid},
                                      {"tol", tol}}},
                      {"certificates", arr},
                      {"all_passed", all_passed}};
    emit(out_path, report.dump(2) + "\n");
    return all_passed ? 0 : 2;
}

// ------------------------------------------------------------- simulate ---

int cmd_simulate(double lambda, const std::string& strategy_name,
                 const std::string& device_spec, double epsilon, int n_tests,
                 std::uint64_t trials, std::uint64_t seed,
                 const StrategyOverrides& ov, const std::string& out_path) {
    const qsv::TargetState target = qsv::make_target(lambda);
    const qsv::Strategy strategy = build_strategy(strategy_name, lambda, ov);

    qsv::DeviceModel device;
    if (device_spec == "honest") {
        device = qsv::honest_device(target);
    } else if (device_spec == "worst") {
        device = qsv::worst_case_device(strategy.op, target, epsilon);
    } else if (device_spec.rfind("file:", 0) == 0) {
        device = qsv::fixed_device(read_device_file(device_spec.substr(5)));
    } else {
        throw qsv::InvalidRange("device must be honest, worst, or file:PATH");
    }

    const qsv::VerificationReport rep = qsv::run_campaign(
        strategy, target, device, n_tests, trials, seed);

    const double diff = std::abs(rep.empirical_rate - rep.predicted_rate);
    // Binomial five-sigma agreement, with an absolute guard for runs whose
    // empirical variance is exactly zero (honest devices).
    const bool within = diff <= 5.0 * rep.std_error + 1e-12;

    const json report{
        {"config", json{{"command", "simulate"},
                        {"lambda", lambda},
                        {"strategy", strategy_name},
                        {"device", device_spec},
                        {"epsilon", epsilon},
                        {"n_tests", n_tests},
                        {"trials", trials},
                        {"seed", seed}}},
        {"accepts", rep.accepts},
        {"trials", rep.trials},
        {"empirical_rate", rep.empirical_rate},
        {"predicted_rate", rep.predicted_rate},
        {"std_error", rep.std_error},
        {"within_five_sigma", within},
    };
    emit(out_path, report.dump(2) + "\n");
    return within ? 0 : 2;
}

// --------------------------------------------------------------- ntests ---

int cmd_ntests(double lambda, const std::string& strategy_name, double epsilon,
               double confidence) {
    const double l2 = lambda2_of(strategy_name, lambda);
    const qsv::NumTests n = qsv::num_tests(l2, {epsilon, confidence});
    std::printf("strategy=%s lambda=%s lambda2=%s n_exact=%lld n_approx=%s\n",
                strategy_name.c_str(), fmt9(lambda).c_str(), fmt9(l2).c_str(),
                n.n_exact, fmt9(n.n_approx).c_str());
    return 0;
}

// ---------------------------------------------------------------- check ---

struct CheckTally {
    bool all_ok = true;

    void item(const std::string& name, bool ok, double worst = -1.0) {
        all_ok = all_ok && ok;
        if (worst >= 0.0) {
            std::printf("[%s] %s (worst %.3e)\n", ok ? "ok" : "FAIL", name.c_str(),
                        worst);
        } else {
            std::printf("[%s] %s\n", ok ? "ok" : "FAIL", name.c_str());
        }
    }
};

int cmd_check() {
    CheckTally t;

    // Closed forms of all catalog strategies across a 51-point grid.
    {
        double worst = 0.0, worst_sep = 0.0, worst_valid = 0.0;
        for (int i = 0; i <= 50; ++i) {
            const double lam = 0.5 * static_cast<double>(i) / 50.0;
            const double root = std::sqrt(lam * (1.0 - lam));
            const double close[] = {(1.0 - lam) / (2.0 - lam), 1.0 / 3.0,
                                    root / (1.0 + root)};
            const std::string names[] = {"one_way", "two_step", "two_way"};
            for (int k = 0; k < 3; ++k) {
                worst = std::max(worst, std::abs(lambda2_of(names[k], lam) - close[k]));
            }
            worst_sep = std::max(worst_sep, std::abs(lambda2_of("sep", lam) -
                                                     lambda2_of("two_way", lam)));
            for (const std::string& n : {"one_way", "two_step", "two_way", "sep"}) {
                const qsv::Strategy s = build_strategy(n, lam);
                const qsv::TargetState target = qsv::make_target(lam);
                worst_valid = std::max({worst_valid, qsv::povm_bounds_defect(s.op),
                                        qsv::psi_passing_defect(s.op, target),
                                        qsv::mixture_defect(s)});
            }
        }
        t.item("catalog closed forms on 51-point grid", worst <= 1e-10, worst);
        t.item("separable threshold equals two-way optimum", worst_sep <= 1e-12,
               worst_sep);
        t.item("catalog operators are valid passing POVM mixtures",
               worst_valid <= 1e-9, worst_valid);
    }

    // Oracle certificates.
    for (const double lam : {0.0, 0.25, 0.5}) {
        const qsv::OptimalityCertificate ppt = qsv::ppt_min_delta(lam);
        t.item("ppt threshold certificate at lambda=" + fmt9(lam), ppt.passed,
               ppt.gap);
    }
    {
        const qsv::OptimalityCertificate c1 = qsv::one_way_oracle(0.25, 300);
        t.item("one-way oracle certificate at lambda=0.25", c1.passed, c1.gap);
        const qsv::OptimalityCertificate c2 = qsv::two_way_grid_search(0.25, 1000);
        t.item("two-way grid certificate at lambda=0.25", c2.passed, c2.gap);
    }

    // Completeness identities on random tilt distributions.
    {
        std::mt19937_64 eng(20250817);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        double worst = 0.0;
        for (int it = 0; it < 1000; ++it) {
            // Two random tilts on opposite sides of 1/2 keep the mean fixable.
            const double t1 = 0.5 + 0.5 * uni(eng);
            const double t2 = 0.5 * uni(eng);
            const double w = (t1 - t2 > 1e-12) ? (0.5 - t2) / (t1 - t2) : 1.0;
            const qsv::TDistribution dist{{{w, t1}, {1.0 - w, t2}}};
            const double lam = 0.5 * uni(eng);
            const auto [r1, r2] = qsv::povm_identity_residuals(dist, lam);
            worst = std::max({worst, r1, r2});
        }
        t.item("completeness identities on 1000 random tilt distributions",
               worst <= 1e-12, worst);
    }

    // Twirl: analytic equals quadrature; never raises the second eigenvalue
    // of a passing strategy.
    {
        std::mt19937_64 eng(977);
        std::normal_distribution<double> gauss(0.0, 1.0);
        double worst_eq = 0.0;
        bool mono = true;
        const qsv::TargetState target = qsv::make_target(0.3);
        for (int it = 0; it < 100; ++it) {
            qsv::Mat4 g{};
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c)
                    g(r, c) = qsv::cplx(gauss(eng), gauss(eng));
            const qsv::Mat4 h = 0.5 * (g + qsv::adjoint(g));
            worst_eq = std::max(
                worst_eq,
                qsv::max_abs_diff(qsv::twirl(h, qsv::TwirlMode::Analytic),
                                  qsv::twirl(h, qsv::TwirlMode::Quadrature, 1024)));

            // Random passing strategy: eigenvalue 1 on psi, a random
            // positive contraction on the complement.
            const qsv::Mat4 proj = qsv::outer(target.psi);
            const qsv::Mat4 comp = qsv::identity4() - proj;
            const qsv::Mat4 b = comp * (h * h) * comp;
            const double top = qsv::eig_hermitian(b).values[0];
            const qsv::Mat4 omega = proj + (0.9 / std::max(top, 1e-12)) * b;
            mono = mono && qsv::second_largest(qsv::twirl(omega)) <=
                               qsv::second_largest(omega) + 1e-12;
        }
        t.item("twirl analytic equals 1024-node quadrature", worst_eq <= 1e-9,
               worst_eq);
        t.item("twirl never raises the second eigenvalue", mono);
    }

    // Sample-count bound.
    {
        const qsv::NumTests n = qsv::num_tests(1.0 / 3.0, {0.01, 0.001});
        const double rate = 1.0 - (2.0 / 3.0) * 0.01;
        const bool ok = n.n_exact == 1033 &&
                        std::pow(rate, static_cast<double>(n.n_exact)) <= 0.001 &&
                        std::pow(rate, static_cast<double>(n.n_exact - 1)) > 0.001;
        t.item("sample count 1033 at (1/3, 0.01, 0.001) with tight guarantee", ok);
    }

    // Honest devices pass every protocol trial.
    {
        bool ok = true;
        for (const double lam : {0.0, 0.25, 0.5}) {
            const qsv::TargetState target = qsv::make_target(lam);
            const qsv::DeviceModel dev = qsv::honest_device(target);
            for (const std::string& n :
                 {"one_way", "two_step", "two_way", "sep", "nonlocal"}) {
                const qsv::VerificationReport rep = qsv::run_campaign(
                    build_strategy(n, lam), target, dev, 1, 20000, 4242);
                ok = ok && rep.empirical_rate == 1.0;
            }
        }
        t.item("honest device passes every protocol trial", ok);
    }

    std::printf("%s\n", t.all_ok ? "all checks passed" : "CHECKS FAILED");
    return t.all_ok ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-qubit pure-state verification strategies: analysis, "
                 "certification, and protocol simulation"};
    app.require_subcommand(1);

    double lambda = 0.25;
    double lambda_min = 0.0, lambda_max = 0.5;
    int steps = 101;
    std::vector<std::string> strategies = kAllStrategies;
    std::string strategy = "two_way";
    double epsilon = 0.01, confidence = 0.001;
    double delta_opt = 0.0, p_opt = 0.0;
    int grid = 1000;
    double tol = 1e-9;
    std::uint64_t trials = 100000, seed = 12345;
    int n_tests = 1;
    std::string device = "honest", out_path;

    CLI::App* sweep = app.add_subcommand(
        "sweep", "tabulate second eigenvalues over a lambda range (CSV)");
    sweep->add_option("--lambda-min", lambda_min, "lower end of the lambda range");
    sweep->add_option("--lambda-max", lambda_max, "upper end of the lambda range");
    sweep->add_option("--steps", steps, "number of lambda samples");
    sweep->add_option("--strategy", strategies,
                      "strategies to tabulate (repeatable)");
    sweep->add_option("--epsilon", epsilon, "infidelity for the n_approx column");
    sweep->add_option("--confidence", confidence,
                      "confidence for the n_approx column");
    sweep->add_option("--out", out_path, "output file (default stdout)");

    CLI::App* certify = app.add_subcommand(
        "certify", "run the independent optimality checks (JSON)");
    certify->add_option("--lambda", lambda, "Schmidt coefficient in [0, 1/2]");
    certify->add_option("--grid", grid, "mesh resolution for the search oracles");
    certify->add_option("--tol", tol, "bisection tolerance for the PPT threshold");
    certify->add_option("--out", out_path, "output file (default stdout)");

    CLI::App* simulate = app.add_subcommand(
        "simulate", "Monte-Carlo protocol campaign against a device (JSON)");
    simulate->add_option("--lambda", lambda, "Schmidt coefficient in [0, 1/2]");
    simulate->add_option("--strategy", strategy,
                         "one_way, two_step, two_way, sep, or nonlocal");
    simulate->add_option("--device", device, "honest, worst, or file:PATH");
    simulate->add_option("--epsilon", epsilon, "infidelity of the worst device");
    simulate->add_option("--n-tests", n_tests, "tests per campaign");
    simulate->add_option("--trials", trials, "number of campaigns");
    simulate->add_option("--seed", seed, "master random seed");
    CLI::Option* dopt =
        simulate->add_option("--delta", delta_opt, "override the damping parameter");
    CLI::Option* popt =
        simulate->add_option("--p", p_opt, "override the mixing probability");
    simulate->add_option("--out", out_path, "output file (default stdout)");

    CLI::App* ntests = app.add_subcommand(
        "ntests", "sample count needed for (epsilon, confidence)");
    ntests->add_option("--lambda", lambda, "Schmidt coefficient in [0, 1/2]");
    ntests->add_option("--strategy", strategy,
                       "one_way, two_step, two_way, sep, nonlocal, or plm");
    ntests->add_option("--epsilon", epsilon, "infidelity to detect");
    ntests->add_option("--confidence", confidence, "residual failure probability");

    CLI::App* check =
        app.add_subcommand("check", "run the built-in invariant battery");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sweep->parsed()) {
            return cmd_sweep(lambda_min, lambda_max, steps, strategies, epsilon,
                             confidence, out_path);
        }
        if (certify->parsed()) return cmd_certify(lambda, grid, tol, out_path);
        if (simulate->parsed()) {
            StrategyOverrides ov;
            ov.has_delta = dopt->count() > 0;
            ov.delta = delta_opt;
            ov.has_p = popt->count() > 0;
            ov.p = p_opt;
            return cmd_simulate(lambda, strategy, device, epsilon, n_tests, trials,
                                seed, ov, out_path);
        }
        if (ntests->parsed()) return cmd_ntests(lambda, strategy, epsilon, confidence);
        if (check->parsed()) return cmd_check();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
