#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qsv/strategies.hpp"

namespace qsv {

// Deterministic per-trial stream: a 64-bit Mersenne Twister seeded through
// a SplitMix64-style mix of (master seed, trial index), so trial k draws
// the same numbers no matter how trials are batched across threads.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index);

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Uniform double in [0, 1) with 53 random bits.
    double uniform();

    // Index drawn from the given nonnegative weights (assumed to sum to ~1;
    // any rounding slack falls onto the last index).
    std::size_t pick(const std::vector<double>& weights);

    // Bernoulli draw that never consumes randomness on near-certain
    // branches: probabilities within 1e-15 of 0 or 1 short-circuit, so an
    // exactly-passing device is accepted on every single trial.
    bool bernoulli(double prob);

  private:
    std::mt19937_64 eng_;
};

enum class Party { Alice, Bob };

struct Message {
    Party from = Party::Alice;
    int bit = 0;
};

// What one execution of one mixture element produced.
struct TrialRecord {
    std::string element_label;
    std::vector<Message> transcript;
    bool accepted = false;
};

// State-preparation model for the device under test.
struct DeviceModel {
    enum class Kind { Honest, WorstCase, FixedState, Mixture };
    Kind kind = Kind::Honest;
    double epsilon = 0.0; // WorstCase only: infidelity of the emitted state
    Mat4 state;           // emitted state (Honest / WorstCase / FixedState)
    std::vector<std::pair<double, Mat4>> components; // Mixture only

    const Mat4& emit(Rng& rng) const;
    Mat4 mean_state() const;
};

// The target state itself.
DeviceModel honest_device(const TargetState& target);

// The eps-far state maximizing the pass probability of the given strategy
// operator (deterministic tie-breaking; see worst_case_state).
DeviceModel worst_case_device(const Mat4& omega, const TargetState& target,
                              double eps);

// A caller-supplied density operator (validated).
DeviceModel fixed_device(const Mat4& rho);

// A classical mixture of density operators; weights must be nonnegative
// and sum to 1 within 1e-12.
DeviceModel mixture_device(std::vector<std::pair<double, Mat4>> components);

// Executes one mixture element as its message-passing protocol on the
// input state sigma: local measurements with Born-rule branching, classical
// messages, and a final accept/reject. Elements without a protocol
// (comm_steps = 0) fall back to a direct coin flip on tr(T sigma).
TrialRecord run_element_trial(const PovmElement& element,
                              const TargetState& target, const Mat4& sigma,
                              Rng& rng);

// Samples one element of the directed single-round strategy (X / Y / Z
// with weights (1-p)/2, (1-p)/2, p) and runs it. Validates sigma.
TrialRecord run_one_way_trial(double lambda, double p, const Mat4& sigma,
                              Rng& rng, Direction dir = Direction::AtoB);

// Samples one element of the three-step strategy (damped X / Y in both
// directions with weights (1-p)/4, Z with weight p) and runs it.
// Validates sigma.
TrialRecord run_two_way_trial(double lambda, double delta, double p,
                              const Mat4& sigma, Rng& rng);

// Aggregate outcome of a full verification campaign.
struct VerificationReport {
    std::uint64_t trials = 0;
    std::uint64_t accepts = 0;
    int n_tests = 1;
    std::uint64_t seed = 0;
    double empirical_rate = 0.0; // accepts / trials
    double predicted_rate = 0.0; // [tr(Omega mean_state)]^n_tests
    double std_error = 0.0;      // binomial, sqrt(r(1-r)/trials)
};

// Runs `trials` independent verification rounds of `n_tests` tests each; a
// round accepts only if every test accepts. Each test draws a fresh state
// from the device and a fresh mixture element from the strategy. Trials are
// distributed over threads (threads = 0 picks a sensible count) without
// affecting the result: every trial runs on its own substream.
VerificationReport run_campaign(const Strategy& strategy,
                                const TargetState& target,
                                const DeviceModel& device, int n_tests,
                                std::uint64_t trials, std::uint64_t seed,
                                int threads = 0);

} // namespace qsv
