#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace aoi {

// Raised when a configuration or state violates its declared ranges.
class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct SensorParams {
    double harvest_rate = 0.0;            // lambda, probability of one energy unit per slot
    int battery_capacity = 1;             // B
    std::vector<double> request_probs;    // p_1..p_N, one per user

    void validate() const;
    bool operator==(const SensorParams&) const = default;
};

struct NetworkConfig {
    int num_users = 1;   // N
    int budget = 1;      // M, commands allowed per slot
    int delta_max = 2;   // AoI cap
    std::vector<SensorParams> sensors;

    int num_sensors() const { return static_cast<int>(sensors.size()); }
    // Normalized budget M / K.
    double gamma() const { return static_cast<double>(budget) / num_sensors(); }
    void validate() const;
    bool operator==(const NetworkConfig&) const = default;
};

struct PerSensorState {
    int requests = 0;  // r in {0..N}
    int battery = 0;   // b in {0..B}
    int age = 1;       // Delta in {1..delta_max}

    auto operator<=>(const PerSensorState&) const = default;
};

// Row-major (r, b, age) indexing of one sensor's state space, age fastest.
class SensorSpace {
public:
    SensorSpace(int num_users, int battery_capacity, int delta_max);

    std::size_t size() const { return size_; }
    int num_users() const { return num_users_; }
    int battery_capacity() const { return battery_capacity_; }
    int delta_max() const { return delta_max_; }

    bool contains(const PerSensorState& s) const;
    std::size_t index(const PerSensorState& s) const;
    PerSensorState state(std::size_t index) const;

    // Index of the (battery, age) pair with the request count dropped.
    std::size_t reduced_index(int battery, int age) const {
        return static_cast<std::size_t>(battery) * delta_max_ + (age - 1);
    }
    std::size_t reduced_size() const { return static_cast<std::size_t>(battery_capacity_ + 1) * delta_max_; }

    // (r=0, b=0, age=1)
    std::size_t reference_index() const { return index({0, 0, 1}); }

private:
    int num_users_;
    int battery_capacity_;
    int delta_max_;
    std::size_t size_;
};

// d = a * 1{b >= 1}
int effective_send(const PerSensorState& state, int action);

// min(b + e - d, B); throws ModelError when d = 1 with an empty battery.
int step_battery(int battery, int sent, int harvested, int capacity);

int step_age(int age, int sent, int delta_max);

// r * min((1 - a 1{b>=1}) age + 1, delta_max), the post-transition age seen by r requests.
int per_sensor_cost(const PerSensorState& state, int action, int delta_max);

// Poisson-binomial pmf of the number of requests, via iterative convolution.
std::vector<double> request_pmf(std::span<const double> request_probs);

struct Transition {
    std::size_t next;
    double prob;
};

// Full successor distribution of one sensor under one action.
std::vector<Transition> per_sensor_kernel(const SensorParams& sensor, int delta_max,
                                          const PerSensorState& state, int action);

// One successor of the (battery, age) part; the request count is drawn independently.
struct ReducedTransition {
    std::size_t next_reduced;
    double prob;
};

/*
Immutable per-sensor MDP: state space, cached transition rows and costs.

Transitions of (b, age) do not depend on r, so rows are stored per (b, age, action)
with at most two successors each; the request pmf is kept separately. Full rows
over (r', b', age') are available via row().
*/
class SensorModel {
public:
    SensorModel(SensorParams params, int delta_max);

    const SensorParams& params() const { return params_; }
    const SensorSpace& space() const { return space_; }
    int delta_max() const { return space_.delta_max(); }
    int num_users() const { return space_.num_users(); }
    std::span<const double> requests() const { return pmf_; }

    // Successors of (b, age) under action (0/1).
    std::span<const ReducedTransition> reduced_row(std::size_t reduced, int action) const;
    // Successors of a full state index, r' expanded.
    std::span<const Transition> row(std::size_t state, int action) const;
    double cost(std::size_t state, int action) const { return cost_[2 * state + action]; }

private:
    SensorParams params_;
    SensorSpace space_;
    std::vector<double> pmf_;
    std::vector<ReducedTransition> reduced_rows_;   // fixed stride 2 per (reduced, action)
    std::vector<std::uint8_t> reduced_counts_;
    std::vector<Transition> rows_;
    std::vector<std::size_t> row_offsets_;
    std::vector<double> cost_;
};

/*
Network instance with sensors grouped by identical parameters, so solvers and
the simulator share one SensorModel per distinct sensor type.
*/
class NetworkModel {
public:
    explicit NetworkModel(NetworkConfig config);

    const NetworkConfig& config() const { return config_; }
    int num_sensors() const { return config_.num_sensors(); }
    std::size_t num_types() const { return types_.size(); }
    const SensorModel& type(std::size_t t) const { return *types_[t]; }
    std::size_t type_of(int sensor) const { return type_of_[sensor]; }
    const SensorModel& sensor(int k) const { return *types_[type_of_[k]]; }
    // Number of sensors of each type.
    const std::vector<int>& type_counts() const { return type_counts_; }

private:
    NetworkConfig config_;
    std::vector<std::shared_ptr<const SensorModel>> types_;
    std::vector<std::size_t> type_of_;
    std::vector<int> type_counts_;
};

}  // namespace aoi
