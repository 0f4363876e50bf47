#include <cmath>
#include <random>

#include "aoi/relaxed_solver.hpp"
#include "aoi/simulator.hpp"
#include "doctest.h"

using namespace aoi;

namespace {

NetworkConfig replicas(const SensorParams& p, int K, int M, int delta_max) {
    NetworkConfig c;
    c.num_users = static_cast<int>(p.request_probs.size());
    c.budget = M;
    c.delta_max = delta_max;
    c.sensors.assign(K, p);
    return c;
}

class CommandAll : public DecisionRule {
public:
    explicit CommandAll(bool budgeted) : budgeted_(budgeted) {}
    std::string name() const override { return "all"; }
    bool budgeted() const override { return budgeted_; }
    void decide(const DecisionContext& ctx, Decision& out) const override {
        out.commands.clear();
        for (int k = 0; k < static_cast<int>(ctx.states.size()); ++k) out.commands.push_back(k);
        out.proposals = static_cast<int>(out.commands.size());
    }

private:
    bool budgeted_;
};

}  // namespace

TEST_CASE("always-on sensor: one per slot after the empty-battery start") {
    const NetworkModel net(replicas(SensorParams{1.0, 1, {1.0}}, 1, 1, 4));
    const GreedyRule rule(1);
    const std::int64_t T = 10000;
    const auto ep = run_episode(net, rule, T, 42);
    // slot 0 starts with b = 0 and age 4, every later slot delivers age 1
    CHECK(ep.cost == static_cast<double>(4 + (T - 1)) / T);
    CHECK(ep.command_rate == 1.0);
}

TEST_CASE("starved sensor sits at the age cap") {
    const NetworkModel net(replicas(SensorParams{0.0, 3, {1.0}}, 1, 1, 6));
    const GreedyRule rule(1);
    const auto ep = run_episode(net, rule, 5000, 1);
    CHECK(ep.cost == 6.0);
}

TEST_CASE("simulated cost matches the stationary evaluation") {
    const NetworkModel net(replicas(SensorParams{0.5, 1, {0.5}}, 1, 1, 2));
    const auto sol = solve_per_sensor(net.type(0), 0.0);
    const auto exact = evaluate_per_sensor(net.type(0), sol.policy);
    const RelaxedRule rule({MixedPolicy::pure(sol.policy)});
    SimOptions o;
    o.horizon = 100000;
    o.episodes = 10;
    o.seed = 99;
    const auto rep = run_experiment(net, rule, o);
    CHECK(std::abs(rep.cost - exact.cost) <= 3.0 * rep.cost_se);
    CHECK(std::abs(rep.command_rate - exact.command_rate) <= 3.0 * rep.command_rate_se);
}

TEST_CASE("same seed, same report; serial and parallel episodes agree") {
    const NetworkModel net(replicas(SensorParams{0.3, 2, {0.4, 0.8}}, 6, 2, 8));
    const GreedyRule rule(2);
    SimOptions o;
    o.horizon = 5000;
    o.episodes = 4;
    o.seed = 123;
    const auto a = run_experiment(net, rule, o);
    const auto b = run_experiment(net, rule, o);
    o.exec = kernels::Exec::serial;
    const auto c = run_experiment(net, rule, o);
    CHECK(a.episodes == b.episodes);
    CHECK(a.episodes == c.episodes);
    CHECK(a.cost == c.cost);
    CHECK(a.trace_mean == c.trace_mean);

    CHECK(run_episode(net, rule, 1000, 5) == run_episode(net, rule, 1000, 5));
    CHECK_FALSE(run_episode(net, rule, 1000, 5) == run_episode(net, rule, 1000, 6));
    CHECK(episode_seed(1, 0) != episode_seed(1, 1));
    CHECK(episode_seed(1, 0) != episode_seed(2, 0));
}

TEST_CASE("truncation never binds when the budget covers every sensor") {
    const NetworkModel net(replicas(SensorParams{0.4, 2, {0.5}}, 3, 3, 5));
    const auto sol = solve_relaxed(net);
    const TruncatedRule rtt(sol.policies, 3);
    const RelaxedRule pure(sol.policies);
    SimOptions o;
    o.horizon = 20000;
    o.episodes = 3;
    const auto a = run_experiment(net, rtt, o);
    const auto b = run_experiment(net, pure, o);
    CHECK(a.episodes == b.episodes);
}

TEST_CASE("report ranges and traces") {
    const NetworkModel net(replicas(SensorParams{0.2, 3, {0.6, 0.6}}, 5, 1, 10));
    const GreedyRule rule(1);
    SimOptions o;
    o.horizon = 20000;
    o.episodes = 3;
    const auto rep = run_experiment(net, rule, o);
    CHECK(rep.cost >= 0.0);
    CHECK(rep.cost <= 10.0);
    CHECK(rep.command_rate >= 0.0);
    CHECK(rep.command_rate <= 1.0);
    CHECK(rep.max_commands <= 1);
    REQUIRE(rep.trace_slots.size() == 100);
    CHECK(rep.trace_slots.back() == o.horizon);
    for (const auto& ep : rep.episodes) CHECK(ep.trace.back() == doctest::Approx(ep.cost).epsilon(1e-12));
}

TEST_CASE("budget overrun is a hard error") {
    const NetworkModel net(replicas(SensorParams{0.5, 1, {0.5}}, 3, 1, 3));
    const CommandAll bad(true), fine(false);
    CHECK_THROWS_AS(run_episode(net, bad, 100, 1), std::logic_error);
    CHECK_NOTHROW(run_episode(net, fine, 100, 1));
}

TEST_CASE("mean absolute deviation") {
    const std::vector<double> c{3.0, 3.0, 3.0};
    CHECK(mean_absolute_deviation(c).mad == 0.0);
    const std::vector<double> two{0.0, 2.0};
    CHECK(mean_absolute_deviation(two).mean == 1.0);
    CHECK(mean_absolute_deviation(two).mad == 1.0);
    CHECK_THROWS_AS(mean_absolute_deviation(std::vector<double>{}), std::invalid_argument);

    std::mt19937_64 rng(17);
    std::normal_distribution<double> z;
    std::vector<double> xs(1'000'000);
    for (auto& x : xs) x = z(rng);
    CHECK(std::abs(mean_absolute_deviation(xs).mad - std::sqrt(2.0 / M_PI)) <= 0.005);

    CountMad cm;
    std::vector<double> ys;
    std::uniform_int_distribution<int> u(0, 12);
    for (int i = 0; i < 10000; ++i) {
        const int v = u(rng);
        cm.add(v);
        ys.push_back(v);
    }
    CHECK(cm.result().mad == doctest::Approx(mean_absolute_deviation(ys).mad).epsilon(1e-12));
    CHECK_THROWS(CountMad{}.result());
}

TEST_CASE("mean and standard error") {
    const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
    const auto [m, se] = mean_and_se(xs);
    CHECK(m == 2.5);
    CHECK(se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
    CHECK(mean_and_se(std::vector<double>{7.0}).second == 0.0);
}
