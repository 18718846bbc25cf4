#include "qsv/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "qsv/analysis.hpp"
#include "qsv/errors.hpp"

namespace qsv {

std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double Rng::uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

std::size_t Rng::pick(const std::vector<double>& weights) {
    if (weights.empty()) throw InvalidRange("pick: empty weight vector");
    const double u = uniform();
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < weights.size(); ++k) {
        acc += weights[k];
        if (u < acc) return k;
    }
    return weights.size() - 1;
}

bool Rng::bernoulli(double prob) {
    if (prob >= 1.0 - 1e-15) return true;
    if (prob <= 1e-15) return false;
    return uniform() < prob;
}

const Mat4& DeviceModel::emit(Rng& rng) const {
    if (kind != Kind::Mixture) return state;
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < components.size(); ++k) {
        acc += components[k].first;
        if (u < acc) return components[k].second;
    }
    return components.back().second;
}

Mat4 DeviceModel::mean_state() const {
    if (kind != Kind::Mixture) return state;
    Mat4 mean{};
    for (const auto& [w, rho] : components) mean = mean + w * rho;
    return mean;
}

DeviceModel honest_device(const TargetState& target) {
    DeviceModel d;
    d.kind = DeviceModel::Kind::Honest;
    d.state = outer(target.psi);
    return d;
}

DeviceModel worst_case_device(const Mat4& omega, const TargetState& target,
                              double eps) {
    DeviceModel d;
    d.kind = DeviceModel::Kind::WorstCase;
    d.epsilon = eps;
    d.state = worst_case_state(omega, target, eps);
    return d;
}

DeviceModel fixed_device(const Mat4& rho) {
    require_density_operator(rho);
    DeviceModel d;
    d.kind = DeviceModel::Kind::FixedState;
    d.state = rho;
    return d;
}

DeviceModel mixture_device(std::vector<std::pair<double, Mat4>> components) {
    if (components.empty()) {
        throw InvalidRange("mixture device needs at least one component");
    }
    double sum = 0.0;
    for (const auto& [w, rho] : components) {
        if (!(w >= 0.0)) throw InvalidRange("mixture weights must be nonnegative");
        require_density_operator(rho);
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw InvalidRange("mixture weights must sum to 1");
    }
    DeviceModel d;
    d.kind = DeviceModel::Kind::Mixture;
    d.components = std::move(components);
    d.state = d.mean_state();
    return d;
}

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

Party other(Party p) { return p == Party::Alice ? Party::Bob : Party::Alice; }

Mat4 embed(Party side, const Mat2& k) {
    return side == Party::Alice ? on_alice(k) : on_bob(k);
}

std::pair<Ket2, Ket2> basis_kets(Basis b) {
    switch (b) {
        case Basis::X: return {ket_plus(), ket_minus()};
        case Basis::Y: return {ket_plus_i(), ket_minus_i()};
        default: return {ket0(), ket1()};
    }
}

// Two-outcome generalized measurement {k0, k1} on one side: draws the
// outcome by the Born rule and collapses rho to the renormalized branch.
int measure_two_outcome(Mat4& rho, Party side, const Mat2& k0, const Mat2& k1,
                        Rng& rng) {
    const Mat4 a0 = embed(side, k0);
    const Mat4 a1 = embed(side, k1);
    const Mat4 m0 = a0 * rho * adjoint(a0);
    const Mat4 m1 = a1 * rho * adjoint(a1);
    const double p0 = std::real(trace(m0));
    const double p1 = std::real(trace(m1));
    const double total = p0 + p1;
    const int outcome =
        rng.bernoulli(total > 0.0 ? clamp01(p0 / total) : 0.0) ? 0 : 1;
    const Mat4& branch = (outcome == 0) ? m0 : m1;
    const double weight = (outcome == 0) ? p0 : p1;
    rho = (1.0 / weight) * branch;
    return outcome;
}

// Final accept/reject: projective check that never collapses.
bool accept_on(const Mat4& rho, Party side, const Ket2& direction, Rng& rng) {
    const Mat4 proj = embed(side, outer(direction));
    return rng.bernoulli(clamp01(std::real(trace(proj * rho))));
}

void run_local_basis(TrialRecord& rec, const PovmElement& e,
                     const TargetState& target, const Mat4& sigma, Rng& rng) {
    const Party init = (e.protocol.dir == Direction::AtoB) ? Party::Alice
                                                           : Party::Bob;
    Mat4 rho = sigma;
    const auto [b0, b1] = basis_kets(e.protocol.basis);
    const int i = measure_two_outcome(rho, init, outer(b0), outer(b1), rng);
    rec.transcript.push_back({init, i});
    const OneWayVectors v = make_one_way_vectors(target.lambda);
    // X pairs + with v+ and - with v-; Y pairs the +i outcome with w- and
    // the -i outcome with w+.
    const Ket2& accept_dir = (e.protocol.basis == Basis::X)
                                 ? (i == 0 ? v.v_plus : v.v_minus)
                                 : (i == 0 ? v.w_minus : v.w_plus);
    rec.accepted = accept_on(rho, other(init), accept_dir, rng);
}

void run_matched_z(TrialRecord& rec, const PovmElement& e, const Mat4& sigma,
                   Rng& rng) {
    const Party init = (e.protocol.dir == Direction::AtoB) ? Party::Alice
                                                           : Party::Bob;
    Mat4 rho = sigma;
    const int first = measure_two_outcome(rho, init, outer(ket0()), outer(ket1()), rng);
    rec.transcript.push_back({init, first});
    const int second =
        measure_two_outcome(rho, other(init), outer(ket0()), outer(ket1()), rng);
    const int a = (init == Party::Alice) ? first : second;
    const int b = (init == Party::Alice) ? second : first;
    rec.accepted = false;
    for (const auto& [pa, pb] : e.protocol.accept_pairs) {
        if (pa == a && pb == b) {
            rec.accepted = true;
            break;
        }
    }
}

void run_three_step(TrialRecord& rec, const PovmElement& e,
                    const TargetState& target, const Mat4& sigma, Rng& rng) {
    const Party init = (e.protocol.dir == Direction::AtoB) ? Party::Alice
                                                           : Party::Bob;
    const Party resp = other(init);
    const double delta = e.protocol.delta;
    Mat4 rho = sigma;

    // When the roles are reversed, Alice first announces that this round
    // runs the reversed test; that notification counts as a message.
    if (e.protocol.dir == Direction::BtoA) {
        rec.transcript.push_back({Party::Alice, 1});
    }

    // Damping step on the initiator: outcome 0 keeps only |0>, outcome 1
    // passes |1> untouched and attenuates |0>.
    Mat2 k0{};
    k0(0, 0) = std::sqrt(delta);
    Mat2 k1{};
    k1(0, 0) = std::sqrt(1.0 - delta);
    k1(1, 1) = 1.0;
    const int m = measure_two_outcome(rho, init, k0, k1, rng);
    rec.transcript.push_back({init, m});

    if (m == 0) {
        // Damped branch: the responder checks for |0> in the Z basis.
        rec.accepted = accept_on(rho, resp, ket0(), rng);
        return;
    }

    const auto [b0, b1] = basis_kets(e.protocol.basis);
    const int j = measure_two_outcome(rho, resp, outer(b0), outer(b1), rng);
    rec.transcript.push_back({resp, j});
    const Ket2& bj = (j == 0) ? b0 : b1;

    // The initiator accepts along the direction the target state collapses
    // to after its own damping outcome 1 and the responder's outcome j.
    const Ket4 tmp = embed(init, k1) * target.psi;
    Ket2 u{};
    for (int x = 0; x < 2; ++x) {
        cplx acc(0.0);
        for (int y = 0; y < 2; ++y) {
            const int idx = (init == Party::Alice) ? 2 * x + y : 2 * y + x;
            acc += std::conj(bj[y]) * tmp[idx];
        }
        u[x] = acc;
    }
    if (norm(u) <= 1e-15) {
        rec.accepted = false;
        return;
    }
    rec.accepted = accept_on(rho, init, normalized(u), rng);
}

} // namespace

TrialRecord run_element_trial(const PovmElement& element,
                              const TargetState& target, const Mat4& sigma,
                              Rng& rng) {
    TrialRecord rec;
    rec.element_label = element.label;
    switch (element.protocol.kind) {
        case ElementProtocol::Kind::LocalBasisTest:
            run_local_basis(rec, element, target, sigma, rng);
            break;
        case ElementProtocol::Kind::MatchedZTest:
            run_matched_z(rec, element, sigma, rng);
            break;
        case ElementProtocol::Kind::ThreeStepTest:
            run_three_step(rec, element, target, sigma, rng);
            break;
        case ElementProtocol::Kind::BornSample:
            rec.accepted =
                rng.bernoulli(clamp01(std::real(trace(element.op * sigma))));
            break;
    }
    // A strategy that coordinates its round with a fair coin spends one
    // extra message announcing the direction of play.
    if (element.comm_steps == 2 &&
        element.protocol.kind != ElementProtocol::Kind::ThreeStepTest) {
        rec.transcript.insert(
            rec.transcript.begin(),
            {Party::Alice, element.protocol.dir == Direction::BtoA ? 1 : 0});
    }
    return rec;
}

namespace {

std::vector<double> mixture_weights(const Strategy& s) {
    std::vector<double> w;
    w.reserve(s.mixture.size());
    for (const auto& [weight, e] : s.mixture) w.push_back(weight);
    return w;
}

} // namespace

TrialRecord run_one_way_trial(double lambda, double p, const Mat4& sigma,
                              Rng& rng, Direction dir) {
    require_density_operator(sigma);
    const Strategy s = omega_one_way(lambda, p, dir);
    const TargetState target = make_target(lambda);
    const std::size_t k = rng.pick(mixture_weights(s));
    return run_element_trial(s.mixture[k].second, target, sigma, rng);
}

TrialRecord run_two_way_trial(double lambda, double delta, double p,
                              const Mat4& sigma, Rng& rng) {
    require_density_operator(sigma);
    const Strategy s = omega_two_way(lambda, delta, p);
    const TargetState target = make_target(lambda);
    const std::size_t k = rng.pick(mixture_weights(s));
    return run_element_trial(s.mixture[k].second, target, sigma, rng);
}

VerificationReport run_campaign(const Strategy& strategy,
                                const TargetState& target,
                                const DeviceModel& device, int n_tests,
                                std::uint64_t trials, std::uint64_t seed,
                                int threads) {
    if (n_tests < 1) throw InvalidRange("run_campaign: n_tests must be >= 1");
    if (trials < 1) throw InvalidRange("run_campaign: trials must be >= 1");
    if (strategy.mixture.empty()) {
        throw DegenerateStrategy("run_campaign: strategy has no mixture elements");
    }
    const std::vector<double> weights = mixture_weights(strategy);

    const auto run_block = [&](std::uint64_t lo, std::uint64_t hi) {
        std::uint64_t hits = 0;
        for (std::uint64_t t = lo; t < hi; ++t) {
            Rng rng(substream_seed(seed, t));
            bool pass = true;
            for (int k = 0; k < n_tests && pass; ++k) {
                const Mat4& sigma = device.emit(rng);
                const std::size_t which = rng.pick(weights);
                pass = run_element_trial(strategy.mixture[which].second, target,
                                         sigma, rng)
                           .accepted;
            }
            hits += pass ? 1 : 0;
        }
        return hits;
    };

    int n_threads = threads;
    if (n_threads <= 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        n_threads = static_cast<int>(std::min(8u, std::max(1u, hw)));
    }
    if (trials < 10000) n_threads = 1;

    std::uint64_t accepts = 0;
    if (n_threads == 1) {
        accepts = run_block(0, trials);
    } else {
        std::vector<std::uint64_t> partial(static_cast<std::size_t>(n_threads), 0);
        std::vector<std::thread> pool;
        const std::uint64_t chunk =
            (trials + static_cast<std::uint64_t>(n_threads) - 1) /
            static_cast<std::uint64_t>(n_threads);
        for (int i = 0; i < n_threads; ++i) {
            const std::uint64_t lo = chunk * static_cast<std::uint64_t>(i);
            const std::uint64_t hi = std::min(trials, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(
                [&partial, &run_block, i, lo, hi] { partial[i] = run_block(lo, hi); });
        }
        for (auto& th : pool) th.join();
        for (const std::uint64_t h : partial) accepts += h;
    }

    VerificationReport report;
    report.trials = trials;
    report.accepts = accepts;
    report.n_tests = n_tests;
    report.seed = seed;
    report.empirical_rate =
        static_cast<double>(accepts) / static_cast<double>(trials);
    const double single =
        clamp01(std::real(trace(strategy.op * device.mean_state())));
    report.predicted_rate = std::pow(single, n_tests);
    report.std_error = std::sqrt(
        std::max(0.0, report.empirical_rate * (1.0 - report.empirical_rate) /
                          static_cast<double>(trials)));
    return report;
}

} // namespace qsv
