#include "urnsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace urnsim {

ModelParams::ModelParams(int n_agents_, double alpha_, double beta_, double q_,
                         ReinforcementFunction f_, long n0_)
    : n_agents(n_agents_), alpha(alpha_), beta(beta_), q(q_), f(std::move(f_)), n0(n0_) {
    if (n_agents < 1)
        throw std::invalid_argument("params: need at least one agent");
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw std::invalid_argument("params: alpha must lie in [0,1)");
    if (!(beta >= 0.0 && beta < 1.0))
        throw std::invalid_argument("params: beta must lie in [0,1)");
    if (!(alpha + beta < 1.0))
        throw std::invalid_argument("params: alpha + beta must be < 1");
    if (!(q > 0.0 && q <= 1.0))
        throw std::invalid_argument("params: q must lie in (0,1]");
    if (n0 < 1)
        throw std::invalid_argument("params: n0 must be >= 1");
}

StateVector make_state(const std::vector<double>& z0) {
    StateVector s;
    s.z.reserve(z0.size());
    for (double v : z0) s.z.push_back(clamp_unit(v));
    s.cum_choices.assign(z0.size(), 0);
    s.zbar = std::accumulate(s.z.begin(), s.z.end(), 0.0) / static_cast<double>(s.z.size());
    return s;
}

InitSpec InitSpec::fixed(std::vector<double> v) {
    InitSpec s;
    s.kind = Kind::Fixed;
    s.values = std::move(v);
    return s;
}

InitSpec InitSpec::constant(double v) {
    InitSpec s;
    s.kind = Kind::Constant;
    s.value = v;
    return s;
}

InitSpec InitSpec::iid_uniform() {
    InitSpec s;
    s.kind = Kind::IidUniform;
    return s;
}

std::vector<double> InitSpec::realize(int n_agents, SplitMix64& rng) const {
    switch (kind) {
        case Kind::Fixed:
            if (static_cast<int>(values.size()) != n_agents)
                throw std::invalid_argument("init: fixed vector length must equal N");
            return values;
        case Kind::Constant:
            return std::vector<double>(n_agents, value);
        case Kind::IidUniform: {
            std::vector<double> z(n_agents);
            for (double& v : z) v = rng.uniform01();
            return z;
        }
    }
    return {};
}

double step_size(const ModelParams& p, long n) {
    return 1.0 / static_cast<double>(p.n0 + n + 1);
}

double choice_probability(const ModelParams& p, const StateVector& s, int h) {
    if (h < 0 || h >= p.n_agents)
        throw std::out_of_range("choice_probability: bad agent index");
    return p.alpha * s.zbar + p.beta * p.q + p.weight() * p.f.eval(s.z[h]);
}

namespace {

ReplicationReport make_report(std::uint64_t seed, StateVector terminal) {
    ReplicationReport rep;
    rep.seed = seed;
    rep.empirical_means.resize(terminal.z.size());
    for (std::size_t h = 0; h < terminal.z.size(); ++h)
        rep.empirical_means[h] = terminal.ibar(static_cast<int>(h));
    rep.terminal = std::move(terminal);
    return rep;
}

RunResult run_from_state(const ModelParams& p, StateVector s, long T,
                         std::uint64_t seed, SplitMix64& rng, long record_every) {
    if (T < 0) throw std::invalid_argument("run: negative horizon");
    if (record_every <= 0) record_every = std::max<long>(1, T / 1000);

    RunResult out;
    out.snapshots.push_back(s);
    for (long n = 1; n <= T; ++n) {
        step_in_place(p, s, rng);
        if (n % record_every == 0 || n == T) out.snapshots.push_back(s);
    }
    out.report = make_report(seed, std::move(s));
    return out;
}

} // namespace

RunResult run(const ModelParams& p, const std::vector<double>& z0, long T,
              std::uint64_t seed, long record_every) {
    if (static_cast<int>(z0.size()) != p.n_agents)
        throw std::invalid_argument("run: z0 length must equal N");
    SplitMix64 rng(seed);
    return run_from_state(p, make_state(z0), T, seed, rng, record_every);
}

RunResult run_replication(const ModelParams& p, const InitSpec& init, long T,
                          std::uint64_t base_seed, long replication, long record_every) {
    const std::uint64_t seed = split_seed(base_seed, static_cast<std::uint64_t>(replication));
    SplitMix64 rng(seed);
    StateVector s = make_state(init.realize(p.n_agents, rng));
    return run_from_state(p, std::move(s), T, seed, rng, record_every);
}

std::vector<ReplicationReport> replicate(const ModelParams& p, const InitSpec& init,
                                         long T, long R, std::uint64_t base_seed,
                                         int threads) {
    if (R < 1) throw std::invalid_argument("replicate: need R >= 1");
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min<int>(threads, static_cast<int>(R)));

    std::vector<ReplicationReport> reports(R);
    auto worker = [&](int t) {
        for (long r = t; r < R; r += threads)
            reports[r] = run_replication(p, init, T, base_seed, r, T > 0 ? T : 1).report;
    };
    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    }
    return reports;
}

} // namespace urnsim
