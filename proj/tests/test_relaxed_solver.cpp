#include <algorithm>
#include <map>

#include "aoi/exact_solver.hpp"
#include "aoi/relaxed_solver.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace aoi;

namespace {

const SensorParams kTiny1{0.5, 1, {0.5}};

NetworkConfig replicas(const SensorParams& p, int K, int M, int delta_max) {
    NetworkConfig c;
    c.num_users = static_cast<int>(p.request_probs.size());
    c.budget = M;
    c.delta_max = delta_max;
    c.sensors.assign(K, p);
    return c;
}

// Gain of a table from the reference state, via the dense oracle.
double oracle_gain(const SensorModel& m, const PolicyTable& t, double mu) {
    const auto& p = m.params();
    const auto states = oracle::enumerate_states(m.num_users(), p.battery_capacity, m.delta_max());
    std::map<oracle::State, int> idx;
    for (std::size_t i = 0; i < states.size(); ++i) idx[states[i]] = static_cast<int>(i);
    const std::size_t n = states.size();
    std::vector<std::vector<double>> P(n, std::vector<double>(n, 0.0));
    std::vector<double> stage(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& [next, w] : oracle::kernel(p, m.delta_max(), states[i], t[i])) P[i][idx.at(next)] += w;
        stage[i] = oracle::cost(states[i], t[i], m.delta_max()) + mu * t[i];
    }
    return oracle::average_from(P, stage, idx.at({0, 0, 1}));
}

}  // namespace

TEST_CASE("huge multiplier: never command") {
    const SensorModel m(SensorParams{0.3, 3, {0.6, 0.6}}, 8);
    const auto sol = solve_per_sensor(m, 2.0 * 8 * 8);
    for (std::size_t s = 0; s < m.space().size(); ++s) CHECK(sol.policy[s] == 0);
}

TEST_CASE("free commands on an always-on sensor") {
    const SensorModel m(SensorParams{1.0, 1, {1.0}}, 4);
    const auto sol = solve_per_sensor(m, 0.0);
    CHECK(sol.rvia.average_cost == doctest::Approx(1.0).epsilon(1e-9));
    for (int age = 1; age <= 4; ++age) CHECK(sol.policy[m.space().index({1, 1, age})] == 1);
}

TEST_CASE("per-sensor solve matches exhaustive policy search") {
    const SensorModel m(kTiny1, 2);
    for (double mu : {0.0, 0.5, 2.0}) {
        const auto sol = solve_per_sensor(m, mu);
        const auto bf = oracle::brute_force_sensor(kTiny1, 2, mu);
        CHECK(bf.policies == 256);
        CHECK(std::abs(sol.rvia.average_cost - bf.gain) <= 1e-6);
        CHECK(std::abs(oracle_gain(m, sol.policy, mu) - bf.gain) <= 1e-9);
    }
}

TEST_CASE("brute force agrees on random small sensors") {
    for (const SensorParams& p : {SensorParams{0.2, 1, {0.9}}, SensorParams{0.9, 1, {0.3}}, SensorParams{0.6, 1, {0.6}}}) {
        const SensorModel m(p, 2);
        for (double mu : {0.0, 0.7, 3.0}) {
            const auto sol = solve_per_sensor(m, mu);
            CHECK(std::abs(sol.rvia.average_cost - oracle::brute_force_sensor(p, 2, mu).gain) <= 1e-6);
        }
    }
}

TEST_CASE("evaluation of simple tables") {
    const SensorModel lazy(SensorParams{0.4, 1, {1.0}}, 2);
    PolicyTable never{std::vector<std::uint8_t>(lazy.space().size(), 0), 0.0};
    auto avg = evaluate_per_sensor(lazy, never);
    CHECK(avg.cost == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(avg.command_rate == 0.0);

    const SensorModel on(SensorParams{1.0, 1, {1.0}}, 3);
    PolicyTable always{std::vector<std::uint8_t>(on.space().size(), 1), 0.0};
    avg = evaluate_per_sensor(on, always);
    CHECK(avg.cost == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(avg.command_rate == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mixed evaluation interpolates the command rate") {
    const SensorModel m(kTiny1, 2);
    const auto lo = solve_per_sensor(m, 0.0).policy;
    const auto hi = solve_per_sensor(m, 100.0).policy;
    const double j_lo = evaluate_per_sensor(m, lo).command_rate;
    const double j_hi = evaluate_per_sensor(m, hi).command_rate;
    CHECK(j_lo > j_hi);
    double prev = j_hi;
    for (double eta = 0.1; eta <= 1.0; eta += 0.1) {
        const double j = evaluate_per_sensor(m, MixedPolicy{lo, hi, eta}).command_rate;
        CHECK(j >= prev - 1e-12);
        prev = j;
    }
    CHECK_THROWS(evaluate_per_sensor(m, MixedPolicy{lo, hi, 1.5}));
}

TEST_CASE("budget equal to K leaves the constraint inactive") {
    const NetworkModel net(replicas(kTiny1, 3, 3, 2));
    const auto sol = solve_relaxed(net);
    CHECK_FALSE(sol.constraint_active);
    CHECK(sol.trajectory.size() == 1);
    CHECK(sol.policies[0].lower == sol.policies[0].upper);
}

TEST_CASE("forced-active tiny instance mixes to the budget") {
    const NetworkModel net(replicas(kTiny1, 20, 1, 2));
    const auto sol = solve_relaxed(net);
    CHECK(sol.constraint_active);
    CHECK(sol.gamma == doctest::Approx(0.05));
    CHECK(sol.eta >= 0.0);
    CHECK(sol.eta <= 1.0);
    CHECK(std::abs(sol.command_rate - 0.05) <= 1e-6);
    CHECK(sol.mu_upper - sol.mu_lower <= 1e-4);
    CHECK(sol.mu_lower <= sol.mu_star);
    CHECK(sol.mu_star <= sol.mu_upper);

    // both ends of the bracket straddle the budget
    const auto& m = net.type(0);
    CHECK(evaluate_per_sensor(m, sol.lower_solutions[0].policy).command_rate >= 0.05 - 1e-12);
    CHECK(evaluate_per_sensor(m, sol.upper_solutions[0].policy).command_rate <= 0.05 + 1e-12);

    auto traj = sol.trajectory;
    std::sort(traj.begin(), traj.end(), [](const DualPoint& a, const DualPoint& b) { return a.mu < b.mu; });
    for (std::size_t i = 1; i < traj.size(); ++i) {
        CHECK(traj[i].command_rate <= traj[i - 1].command_rate + 1e-9);
        CHECK(traj[i].lagrangian_sum >= traj[i - 1].lagrangian_sum - 1e-9 * (1.0 + traj[i].lagrangian_sum));
    }
}

TEST_CASE("relaxed bound sits below the exact optimum") {
    for (int K : {1, 2}) {
        const NetworkModel net(replicas(kTiny1, K, 1, 2));
        const auto relaxed = solve_relaxed(net);
        const auto exact = solve_exact(net);
        CHECK(relaxed.lower_bound <= exact.rvia.average_cost + 1e-6);
        if (K == 1) CHECK(relaxed.lower_bound == doctest::Approx(exact.rvia.average_cost).epsilon(1e-6));
    }
}

TEST_CASE("warm start and parallel types do not change the answer") {
    NetworkConfig c = replicas(SensorParams{0.2, 2, {0.5, 0.5}}, 4, 1, 6);
    c.sensors[1].harvest_rate = 0.5;
    c.sensors[3].harvest_rate = 0.05;
    const NetworkModel net(c);
    RelaxedOptions cold;
    cold.warm_start = false;
    RelaxedOptions par;
    par.rvia.exec = kernels::Exec::parallel;
    const auto a = solve_relaxed(net);
    const auto b = solve_relaxed(net, cold);
    const auto p = solve_relaxed(net, par);
    CHECK(a.lower_bound == doctest::Approx(b.lower_bound).epsilon(1e-6));
    CHECK(a.command_rate == doctest::Approx(b.command_rate).epsilon(1e-6));
    CHECK(a.lower_bound == p.lower_bound);
    CHECK(a.policies == p.policies);
}
