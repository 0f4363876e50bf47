#include "aoi/simulator.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <stdexcept>

namespace aoi {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::int64_t resolve_interval(std::int64_t horizon, std::int64_t interval) {
    if (interval > 0) return interval;
    return std::max<std::int64_t>(1, horizon / 100);
}

}  // namespace

std::uint64_t episode_seed(std::uint64_t master, int episode) {
    return splitmix64(splitmix64(master) + static_cast<std::uint64_t>(episode));
}

EpisodeMetrics run_episode(const NetworkModel& network, const DecisionRule& rule, std::int64_t horizon,
                           std::uint64_t seed, std::int64_t trace_interval) {
    if (horizon < 1) throw std::invalid_argument("horizon must be at least one slot");
    const NetworkConfig& cfg = network.config();
    const int K = network.num_sensors();
    const int D = cfg.delta_max;
    const std::int64_t interval = resolve_interval(horizon, trace_interval);

    // inverse-CDF tables of the request count, per sensor type
    std::vector<std::vector<double>> cdf(network.num_types());
    for (std::size_t t = 0; t < network.num_types(); ++t) {
        double acc = 0.0;
        for (double p : network.type(t).requests()) cdf[t].push_back(acc += p);
        cdf[t].back() = 2.0;
    }

    Rng env(splitmix64(seed));
    Rng pol(splitmix64(seed ^ 0x5bd1e9955bd1e995ull));
    std::vector<PerSensorState> states(K, PerSensorState{0, 0, D});
    std::vector<std::size_t> index(K);
    std::vector<std::uint8_t> act(K, 0);
    Decision dec;
    CountMad proposals;
    EpisodeMetrics out;
    std::int64_t cost_sum = 0, command_sum = 0;
    const double norm = static_cast<double>(cfg.num_users) * K;

    for (std::int64_t t = 0; t < horizon; ++t) {
        for (int k = 0; k < K; ++k) {
            const auto& c = cdf[network.type_of(k)];
            const double u = uniform01(env);
            int r = 0;
            while (!(u < c[r])) ++r;
            states[k].requests = r;
            index[k] = network.sensor(k).space().index(states[k]);
        }

        rule.decide(DecisionContext{t, states, index, &pol}, dec);
        const int n_cmd = static_cast<int>(dec.commands.size());
        if (rule.budgeted() && n_cmd > cfg.budget)
            throw std::logic_error(rule.name() + " commanded " + std::to_string(n_cmd) + " sensors in slot " +
                                   std::to_string(t) + " with budget " + std::to_string(cfg.budget));
        for (int k : dec.commands) act[k] = 1;
        out.max_commands = std::max(out.max_commands, n_cmd);
        command_sum += n_cmd;
        proposals.add(dec.proposals);

        for (int k = 0; k < K; ++k) {
            const SensorModel& m = network.sensor(k);
            auto& s = states[k];
            cost_sum += static_cast<std::int64_t>(m.cost(index[k], act[k]));
            const int e = uniform01(env) < m.params().harvest_rate ? 1 : 0;
            const int d = effective_send(s, act[k]);
            s.battery = step_battery(s.battery, d, e, m.params().battery_capacity);
            s.age = step_age(s.age, d, D);
            act[k] = 0;
        }
        if ((t + 1) % interval == 0) out.trace.push_back(static_cast<double>(cost_sum) / (norm * (t + 1)));
    }

    out.cost = static_cast<double>(cost_sum) / (norm * horizon);
    out.command_rate = static_cast<double>(command_sum) / (static_cast<double>(K) * horizon);
    const auto mad = proposals.result();
    out.proposal_mean = mad.mean;
    out.proposal_mad = mad.mad;
    return out;
}

SimReport run_experiment(const NetworkModel& network, const DecisionRule& rule, const SimOptions& opts) {
    if (opts.episodes < 1) throw std::invalid_argument("at least one episode is required");
    const auto start = std::chrono::steady_clock::now();
    SimReport rep;
    rep.policy = rule.name();
    rep.episodes.resize(opts.episodes);
    std::vector<std::exception_ptr> errors(opts.episodes);
    auto work = [&](int e) {
        try {
            rep.episodes[e] =
                run_episode(network, rule, opts.horizon, episode_seed(opts.seed, e), opts.trace_interval);
        } catch (...) {
            errors[e] = std::current_exception();
        }
    };
    if (opts.exec == kernels::Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (int e = 0; e < opts.episodes; ++e) work(e);
    } else {
        for (int e = 0; e < opts.episodes; ++e) work(e);
    }
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);

    std::vector<double> cost, rate, mad;
    for (const auto& ep : rep.episodes) {
        cost.push_back(ep.cost);
        rate.push_back(ep.command_rate);
        mad.push_back(ep.proposal_mad);
        rep.proposal_mean += ep.proposal_mean / opts.episodes;
        rep.max_commands = std::max(rep.max_commands, ep.max_commands);
    }
    std::tie(rep.cost, rep.cost_se) = mean_and_se(cost);
    std::tie(rep.command_rate, rep.command_rate_se) = mean_and_se(rate);
    std::tie(rep.mad, rep.mad_se) = mean_and_se(mad);

    const std::int64_t interval = resolve_interval(opts.horizon, opts.trace_interval);
    const std::size_t points = rep.episodes.front().trace.size();
    for (std::size_t i = 0; i < points; ++i) {
        rep.trace_slots.push_back(interval * static_cast<std::int64_t>(i + 1));
        double acc = 0.0;
        for (const auto& ep : rep.episodes) acc += ep.trace[i];
        rep.trace_mean.push_back(acc / opts.episodes);
    }
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

MadResult mean_absolute_deviation(std::span<const double> samples) {
    if (samples.empty()) throw std::invalid_argument("mean absolute deviation of an empty sample");
    MadResult out;
    for (double x : samples) out.mean += x;
    out.mean /= static_cast<double>(samples.size());
    for (double x : samples) out.mad += std::abs(x - out.mean);
    out.mad /= static_cast<double>(samples.size());
    return out;
}

void CountMad::add(int value) {
    if (value < 0) throw std::invalid_argument("CountMad takes non-negative values");
    if (static_cast<std::size_t>(value) >= hist_.size()) hist_.resize(value + 1, 0);
    ++hist_[value];
    ++total_;
}

MadResult CountMad::result() const {
    if (total_ == 0) throw std::invalid_argument("mean absolute deviation of an empty sample");
    MadResult out;
    std::int64_t sum = 0;
    for (std::size_t v = 0; v < hist_.size(); ++v) sum += hist_[v] * static_cast<std::int64_t>(v);
    out.mean = static_cast<double>(sum) / total_;
    for (std::size_t v = 0; v < hist_.size(); ++v)
        out.mad += static_cast<double>(hist_[v]) * std::abs(static_cast<double>(v) - out.mean);
    out.mad /= total_;
    return out;
}

std::pair<double, double> mean_and_se(std::span<const double> xs) {
    if (xs.empty()) return {0.0, 0.0};
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double var = ss / static_cast<double>(xs.size() - 1);
    return {mean, std::sqrt(var / static_cast<double>(xs.size()))};
}

}  // namespace aoi
