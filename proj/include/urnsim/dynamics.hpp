#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "urnsim/reinforcement.hpp"
#include "urnsim/rng.hpp"

namespace urnsim {

// Parameters of one interacting system.
//
// Agent h flips a conditionally independent coin with success probability
//   P_h = alpha * mean(z) + beta * q + (1 - alpha - beta) * f(z_h)
// and relaxes toward the outcome with step r_n = 1/(n0 + n + 1).
struct ModelParams {
    int n_agents;
    double alpha;
    double beta;
    double q;
    ReinforcementFunction f;
    long n0;

    ModelParams(int n_agents, double alpha, double beta, double q,
                ReinforcementFunction f, long n0 = 1);

    double weight() const { return 1.0 - alpha - beta; } // personal component
};

struct StateVector {
    long n = 0;
    std::vector<double> z;           // inclinations, each in [0,1]
    std::vector<long> cum_choices;   // running sums of the binary choices
    double zbar = 0.0;               // mean of z

    // Empirical mean of choices for agent h up to time n (0 at n = 0).
    double ibar(int h) const {
        return n == 0 ? 0.0 : static_cast<double>(cum_choices[h]) / static_cast<double>(n);
    }
};

StateVector make_state(const std::vector<double>& z0);

struct ReplicationReport {
    std::uint64_t seed = 0;
    StateVector terminal;
    std::vector<double> empirical_means;
    std::optional<int> assigned_zero;  // index into a zero list, set by basin assignment
    double distance_to_zero = 0.0;     // sorted-component Euclidean distance when assigned
};

struct RunResult {
    std::vector<StateVector> snapshots; // at n = 0, k*record_every, ..., T
    ReplicationReport report;
};

// Initial condition: a fixed vector, a constant, or i.i.d. uniform components
// drawn from the replication's own stream before the first step.
struct InitSpec {
    enum class Kind { Fixed, Constant, IidUniform };
    Kind kind = Kind::Constant;
    std::vector<double> values;
    double value = 0.5;

    static InitSpec fixed(std::vector<double> v);
    static InitSpec constant(double v);
    static InitSpec iid_uniform();

    std::vector<double> realize(int n_agents, SplitMix64& rng) const;
};

double step_size(const ModelParams& p, long n);

// P(I_{n+1,h} = 1 | state), h is a 0-based agent index.
double choice_probability(const ModelParams& p, const StateVector& s, int h);

// One transition. All N coin probabilities are computed from the incoming
// state, then each z_h moves by the convex update, so the output stays in
// [0,1] exactly. Templated on the random stream so tests can force outcomes.
template <class Rng>
void step_in_place(const ModelParams& p, StateVector& s, Rng& rng) {
    const double r = step_size(p, s.n);
    const double shared = p.alpha * s.zbar + p.beta * p.q;
    const double w = p.weight();
    double sum = 0.0;
    for (int h = 0; h < p.n_agents; ++h) {
        const double prob = shared + w * p.f.eval(s.z[h]);
        const double choice = rng.uniform01() < prob ? 1.0 : 0.0;
        s.z[h] = (1.0 - r) * s.z[h] + r * choice;
        s.cum_choices[h] += choice > 0.5 ? 1 : 0;
        sum += s.z[h];
    }
    s.n += 1;
    s.zbar = sum / p.n_agents;
}

template <class Rng>
StateVector step(const ModelParams& p, const StateVector& s, Rng& rng) {
    StateVector out = s;
    step_in_place(p, out, rng);
    return out;
}

// Deterministic given (p, z0, T, seed); snapshots every record_every steps
// plus the terminal state. record_every <= 0 picks max(1, T/1000).
RunResult run(const ModelParams& p, const std::vector<double>& z0, long T,
              std::uint64_t seed, long record_every = 0);

// Runs replication r of an experiment: stream seeded with
// split_seed(base_seed, r), initial state realized from that stream.
RunResult run_replication(const ModelParams& p, const InitSpec& init, long T,
                          std::uint64_t base_seed, long replication,
                          long record_every = 0);

// R independent replications; executes on up to `threads` threads (0 = all
// hardware threads). Reports are ordered by replication index and identical
// for every thread count.
std::vector<ReplicationReport> replicate(const ModelParams& p, const InitSpec& init,
                                         long T, long R, std::uint64_t base_seed,
                                         int threads = 0);

} // namespace urnsim
