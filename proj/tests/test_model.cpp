#include <cmath>
#include <random>

#include "aoi/model.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace aoi;

namespace {

SensorParams tiny1() { return SensorParams{0.5, 1, {0.5}}; }

SensorParams random_params(std::mt19937_64& rng, int max_users, int max_battery) {
    std::uniform_int_distribution<int> users(1, max_users), battery(1, max_battery);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    SensorParams p;
    p.harvest_rate = unit(rng);
    p.battery_capacity = battery(rng);
    p.request_probs.resize(users(rng));
    for (auto& q : p.request_probs) q = unit(rng) < 0.1 ? std::round(unit(rng)) : unit(rng);
    return p;
}

}  // namespace

TEST_CASE("effective send needs energy") {
    CHECK(effective_send({1, 0, 4}, 1) == 0);
    CHECK(effective_send({1, 3, 4}, 1) == 1);
    CHECK(effective_send({1, 3, 4}, 0) == 0);
}

TEST_CASE("battery update") {
    CHECK(step_battery(5, 0, 1, 5) == 5);
    CHECK(step_battery(1, 1, 0, 5) == 0);
    CHECK(step_battery(1, 1, 1, 5) == 1);
    CHECK(step_battery(0, 0, 1, 5) == 1);
    CHECK_THROWS_AS(step_battery(0, 1, 0, 5), ModelError);
}

TEST_CASE("age update") {
    CHECK(step_age(8, 0, 8) == 8);
    CHECK(step_age(5, 1, 8) == 1);
    CHECK(step_age(5, 0, 8) == 6);
}

TEST_CASE("per-sensor cost") {
    CHECK(per_sensor_cost({0, 5, 30}, 0, 64) == 0);
    CHECK(per_sensor_cost({2, 1, 9}, 1, 64) == 2);
    CHECK(per_sensor_cost({3, 0, 64}, 1, 64) == 3 * 64);
    CHECK(per_sensor_cost({2, 0, 5}, 0, 64) == 12);
}

TEST_CASE("cost is r times the post-transition age, zero without requests") {
    for (int D : {2, 5})
        for (int r = 0; r <= 3; ++r)
            for (int b = 0; b <= 2; ++b)
                for (int age = 1; age <= D; ++age)
                    for (int a = 0; a <= 1; ++a) {
                        const PerSensorState s{r, b, age};
                        const int next_age = step_age(age, effective_send(s, a), D);
                        CHECK(per_sensor_cost(s, a, D) == r * next_age);
                        if (r == 0) CHECK(per_sensor_cost(s, a, D) == 0);
                    }
}

TEST_CASE("request pmf") {
    const std::vector<double> half{0.5, 0.5};
    auto p = request_pmf(half);
    REQUIRE(p.size() == 3);
    CHECK(p[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(p[2] == doctest::Approx(0.25).epsilon(1e-15));

    const std::vector<double> iid{0.6, 0.6, 0.6};
    p = request_pmf(iid);
    const double want[] = {0.064, 0.288, 0.432, 0.216};
    for (int m = 0; m < 4; ++m) CHECK(std::abs(p[m] - want[m]) < 1e-15);

    const std::vector<double> degenerate{1.0, 0.0};
    p = request_pmf(degenerate);
    CHECK(p[0] == 0.0);
    CHECK(p[1] == 1.0);
    CHECK(p[2] == 0.0);
}

TEST_CASE("request pmf matches pattern enumeration") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 50; ++i) {
        const auto params = random_params(rng, 6, 1);
        const auto got = request_pmf(params.request_probs);
        const auto want = oracle::request_pmf(params.request_probs);
        double sum = 0.0;
        for (std::size_t m = 0; m < got.size(); ++m) {
            CHECK(std::abs(got[m] - want[m]) < 1e-13);
            sum += got[m];
        }
        CHECK(std::abs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("state indexing round-trips") {
    const SensorSpace sp(3, 7, 64);
    CHECK(sp.size() == 4u * 8u * 64u);
    for (std::size_t i = 0; i < sp.size(); ++i) CHECK(sp.index(sp.state(i)) == i);
    CHECK(sp.index({0, 0, 1}) == 0);
    CHECK(sp.index({0, 0, 2}) == 1);
    CHECK(sp.index({0, 1, 1}) == 64);
    CHECK(sp.index({1, 0, 1}) == 8 * 64);
    CHECK_FALSE(sp.contains({0, 0, 0}));
    CHECK_FALSE(sp.contains({4, 0, 1}));
    CHECK_THROWS_AS(sp.index({0, 8, 1}), ModelError);
}

TEST_CASE("kernel examples") {
    const SensorParams p{0.06, 3, {0.5}};
    const SensorModel m(p, 5);
    // battery rises with probability lambda when idle below capacity
    double up = 0.0, stay = 0.0;
    for (const auto& t : m.row(m.space().index({0, 1, 2}), 0)) {
        const auto s = m.space().state(t.next);
        if (s.battery == 2) up += t.prob;
        if (s.battery == 1) stay += t.prob;
    }
    CHECK(up == doctest::Approx(0.06));
    CHECK(stay == doctest::Approx(0.94));
    // a successful update resets the age
    for (const auto& t : m.row(m.space().index({1, 2, 4}), 1)) CHECK(m.space().state(t.next).age == 1);

    const SensorModel t1(tiny1(), 2);
    const auto row = t1.row(t1.space().index({1, 1, 1}), 1);
    REQUIRE(row.size() == 4);
    for (const auto& t : row) {
        CHECK(t.prob == doctest::Approx(0.25));
        CHECK(t1.space().state(t.next).age == 1);
    }
}

TEST_CASE("kernel rows agree with enumeration and sum to one") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 40; ++i) {
        const auto params = random_params(rng, 3, 4);
        const int D = 2 + static_cast<int>(rng() % 6);
        const SensorModel m(params, D);
        for (std::size_t s = 0; s < m.space().size(); ++s)
            for (int a = 0; a <= 1; ++a) {
                const auto st = m.space().state(s);
                const auto want = oracle::kernel(params, D, {st.requests, st.battery, st.age}, a);
                double sum = 0.0;
                for (const auto& t : m.row(s, a)) {
                    const auto n = m.space().state(t.next);
                    const auto it = want.find({n.requests, n.battery, n.age});
                    REQUIRE(it != want.end());
                    CHECK(std::abs(it->second - t.prob) < 1e-14);
                    sum += t.prob;
                }
                CHECK(std::abs(sum - 1.0) < 1e-12);
                CHECK(m.row(s, a).size() == want.size());
                CHECK(m.row(s, a).size() <= 2u * (params.request_probs.size() + 1));
                CHECK(m.cost(s, a) == per_sensor_cost(st, a, D));
            }
    }
}

TEST_CASE("config validation") {
    NetworkConfig c;
    c.num_users = 1;
    c.budget = 1;
    c.delta_max = 2;
    c.sensors = {SensorParams{0.5, 1, {0.5}}};
    CHECK_NOTHROW(c.validate());
    c.budget = 2;
    CHECK_THROWS_AS(c.validate(), ModelError);
    c.budget = 0;
    CHECK_THROWS_AS(c.validate(), ModelError);
    c.budget = 1;
    c.delta_max = 1;
    CHECK_THROWS_AS(c.validate(), ModelError);
    c.delta_max = 2;
    c.sensors[0].harvest_rate = 1.5;
    CHECK_THROWS_AS(c.validate(), ModelError);
    c.sensors[0].harvest_rate = 1.0;
    c.sensors[0].request_probs = {0.5, 0.5};
    CHECK_THROWS_AS(c.validate(), ModelError);
    c.sensors[0].request_probs = {-0.1};
    CHECK_THROWS_AS(c.validate(), ModelError);
    c.sensors[0].request_probs = {0.1};
    c.sensors[0].battery_capacity = 0;
    CHECK_THROWS_AS(c.validate(), ModelError);
}

TEST_CASE("identical sensors share one type") {
    NetworkConfig c;
    c.num_users = 1;
    c.budget = 1;
    c.delta_max = 4;
    for (int k = 0; k < 6; ++k) c.sensors.push_back(SensorParams{k % 2 ? 0.3 : 0.6, 2, {0.5}});
    const NetworkModel net(c);
    CHECK(net.num_types() == 2);
    CHECK(net.type_counts()[0] + net.type_counts()[1] == 6);
    CHECK(net.type_of(0) == net.type_of(2));
    CHECK(net.type_of(0) != net.type_of(1));
    CHECK(net.sensor(3).params().harvest_rate == 0.3);
}
