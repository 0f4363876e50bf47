#include "aoi/experiment.hpp"
#include "doctest.h"

using namespace aoi;

namespace {

const char* kBase = R"(# example
num_sensors = 40
num_users = 3
budget = 1
delta_max = 64
battery_capacity = 7
request_prob = 0.6   # every user, every sensor
harvest_set = 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.1
policies = rtt, greedy
horizon = 100000
episodes = 10
seed = 3
)";

}  // namespace

TEST_CASE("parse, serialize, parse") {
    const auto a = parse_spec(kBase);
    CHECK(a.num_sensors == 40);
    CHECK(a.budget == 1);
    CHECK_FALSE(a.gamma.has_value());
    CHECK(a.effective_gamma() == doctest::Approx(0.025));
    CHECK(a.request_probs == std::vector<std::vector<double>>{{0.6}});
    CHECK(a.seed == 3);
    const auto text = serialize_spec(a);
    const auto b = parse_spec(text);
    CHECK(a == b);
    CHECK(serialize_spec(b) == text);
    CHECK(spec_hash(a) == spec_hash(b));
    CHECK(spec_hash(a).size() == 16);

    auto c = a;
    c.seed = 4;
    CHECK(spec_hash(c) != spec_hash(a));
}

TEST_CASE("defaults when keys are omitted") {
    const auto s = parse_spec("budget = 1\n");
    CHECK(s == [] {
        ExperimentSpec d;
        d.budget = 1;
        return d;
    }());
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(parse_spec("budget = 1\nbogus = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_spec("budget = 1\nbudget = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_spec("budget = 1\nrequest_prob = 0.5\nrequest_probs = 0.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_spec("num_sensors = 4\n"), ConfigError);
    CHECK_THROWS_AS(parse_spec("budget = 1\ngamma = 0.1\n"), ConfigError);
    CHECK_THROWS_AS(parse_spec("budget = x\n"), ConfigError);
    CHECK_THROWS_AS(parse_spec("budget = 1\ndelta_max = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_spec("budget = 1\npolicies = rtt, magic\n"), ConfigError);
    CHECK_THROWS_AS(parse_spec("budget = 1\njust words\n"), ConfigError);
    CHECK_THROWS_AS(parse_spec("budget = 1\nrequest_prob = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(load_spec("/nonexistent/file.cfg"), ConfigError);
}

TEST_CASE("network construction") {
    auto s = parse_spec(kBase);
    const auto cfg = build_network(s);
    CHECK(cfg.num_sensors() == 40);
    CHECK(cfg.budget == 1);
    CHECK(cfg.sensors[0].harvest_rate == 0.01);
    CHECK(cfg.sensors[9].harvest_rate == 0.1);
    CHECK(cfg.sensors[10].harvest_rate == 0.01);
    CHECK(cfg.sensors[39].harvest_rate == 0.1);
    CHECK(cfg.sensors[5].request_probs == std::vector<double>{0.6, 0.6, 0.6});

    const auto big = build_network(s, 800);
    CHECK(big.budget == 20);
    CHECK(big.sensors[799].harvest_rate == 0.1);
    CHECK_THROWS_AS(build_network(s, 30), ConfigError);
    CHECK(build_network(s, 80, 0.05).budget == 4);

    s.harvest_rates = {0.5, 0.5};
    CHECK_THROWS_AS(build_network(s), ConfigError);
    s.harvest_rates.clear();
    s.request_probs = {{0.1, 0.2}};
    CHECK_THROWS_AS(build_network(s), ConfigError);
    s.request_probs = {{0.1, 0.2, 0.3}};
    CHECK(build_network(s).sensors[7].request_probs == std::vector<double>{0.1, 0.2, 0.3});
}

TEST_CASE("round-robin rates") {
    CHECK(round_robin_rates({0.1, 0.2, 0.3}, 5) == std::vector<double>{0.1, 0.2, 0.3, 0.1, 0.2});
    CHECK_THROWS_AS(round_robin_rates({}, 3), ConfigError);
}

TEST_CASE("solver and simulation options follow the config") {
    auto s = parse_spec(kBase);
    s.theta = 1e-8;
    s.max_iterations = 77;
    const auto ro = relaxed_options(s);
    CHECK(ro.rvia.theta == 1e-8);
    CHECK(ro.rvia.max_iterations == 77);
    const auto so = sim_options(s);
    CHECK(so.horizon == 100000);
    CHECK(so.episodes == 10);
    CHECK(so.seed == 3);
    CHECK(std::string(build_tag()).size() > 0);
}

TEST_CASE("hash ignores the output directory") {
    auto a = parse_spec(kBase);
    auto b = a;
    b.out_dir = "/somewhere/else";
    CHECK(spec_hash(a) == spec_hash(b));
}
