#include "aoi/model.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace aoi {

namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

int validated_users(const SensorParams& p) {
    p.validate();
    return static_cast<int>(p.request_probs.size());
}

}  // namespace

void SensorParams::validate() const {
    if (!is_probability(harvest_rate))
        throw ModelError("harvest rate must lie in [0, 1], got " + std::to_string(harvest_rate));
    if (battery_capacity < 1)
        throw ModelError("battery capacity must be >= 1, got " + std::to_string(battery_capacity));
    if (request_probs.empty())
        throw ModelError("sensor needs at least one request probability");
    for (double p : request_probs)
        if (!is_probability(p))
            throw ModelError("request probability must lie in [0, 1], got " + std::to_string(p));
}

void NetworkConfig::validate() const {
    if (num_users < 1) throw ModelError("num_users must be >= 1");
    if (sensors.empty()) throw ModelError("network needs at least one sensor");
    if (budget < 1 || budget > num_sensors())
        throw ModelError("budget M must satisfy 1 <= M <= K (M=" + std::to_string(budget) +
                         ", K=" + std::to_string(num_sensors()) + ")");
    if (delta_max < 2) throw ModelError("delta_max must be >= 2");
    for (const auto& s : sensors) {
        s.validate();
        if (static_cast<int>(s.request_probs.size()) != num_users)
            throw ModelError("every sensor needs exactly num_users request probabilities");
    }
}

SensorSpace::SensorSpace(int num_users, int battery_capacity, int delta_max)
    : num_users_(num_users), battery_capacity_(battery_capacity), delta_max_(delta_max) {
    if (num_users < 1 || battery_capacity < 1 || delta_max < 2)
        throw ModelError("invalid sensor space dimensions");
    size_ = static_cast<std::size_t>(num_users + 1) * (battery_capacity + 1) * delta_max;
}

bool SensorSpace::contains(const PerSensorState& s) const {
    return s.requests >= 0 && s.requests <= num_users_ && s.battery >= 0 &&
           s.battery <= battery_capacity_ && s.age >= 1 && s.age <= delta_max_;
}

std::size_t SensorSpace::index(const PerSensorState& s) const {
    if (!contains(s)) throw ModelError("per-sensor state out of range");
    return (static_cast<std::size_t>(s.requests) * (battery_capacity_ + 1) + s.battery) * delta_max_ +
           (s.age - 1);
}

PerSensorState SensorSpace::state(std::size_t index) const {
    if (index >= size_) throw ModelError("per-sensor state index out of range");
    PerSensorState s;
    s.age = static_cast<int>(index % delta_max_) + 1;
    index /= delta_max_;
    s.battery = static_cast<int>(index % (battery_capacity_ + 1));
    s.requests = static_cast<int>(index / (battery_capacity_ + 1));
    return s;
}

int effective_send(const PerSensorState& state, int action) {
    return (action != 0 && state.battery >= 1) ? 1 : 0;
}

int step_battery(int battery, int sent, int harvested, int capacity) {
    if (sent != 0 && battery < 1) throw ModelError("energy causality violated: send with empty battery");
    return std::min(battery + harvested - sent, capacity);
}

int step_age(int age, int sent, int delta_max) {
    return sent != 0 ? 1 : std::min(age + 1, delta_max);
}

int per_sensor_cost(const PerSensorState& state, int action, int delta_max) {
    const int d = effective_send(state, action);
    return state.requests * std::min((1 - d) * state.age + 1, delta_max);
}

std::vector<double> request_pmf(std::span<const double> request_probs) {
    std::vector<double> pmf(request_probs.size() + 1, 0.0);
    pmf[0] = 1.0;
    std::size_t n = 0;
    for (double p : request_probs) {
        ++n;
        for (std::size_t m = n; m > 0; --m) pmf[m] = pmf[m] * (1.0 - p) + pmf[m - 1] * p;
        pmf[0] *= (1.0 - p);
    }
    return pmf;
}

namespace {

// (b', age') outcomes for one action, merged when both energy outcomes coincide.
int battery_age_successors(double lambda, int capacity, int delta_max, int battery, int age, int action,
                           ReducedTransition out[2], const SensorSpace& space) {
    const int d = (action != 0 && battery >= 1) ? 1 : 0;
    const int next_age = step_age(age, d, delta_max);
    int count = 0;
    const int outcomes[2] = {0, 1};
    const double probs[2] = {1.0 - lambda, lambda};
    for (int i = 0; i < 2; ++i) {
        if (probs[i] <= 0.0) continue;
        const int next_b = step_battery(battery, d, outcomes[i], capacity);
        const std::size_t idx = space.reduced_index(next_b, next_age);
        if (count == 1 && out[0].next_reduced == idx) {
            out[0].prob += probs[i];
        } else {
            out[count++] = {idx, probs[i]};
        }
    }
    return count;
}

}  // namespace

std::vector<Transition> per_sensor_kernel(const SensorParams& sensor, int delta_max,
                                          const PerSensorState& state, int action) {
    sensor.validate();
    const SensorSpace space(static_cast<int>(sensor.request_probs.size()), sensor.battery_capacity, delta_max);
    if (!space.contains(state)) throw ModelError("per-sensor state out of range");
    const auto pmf = request_pmf(sensor.request_probs);
    ReducedTransition reduced[2];
    const int n = battery_age_successors(sensor.harvest_rate, sensor.battery_capacity, delta_max, state.battery,
                                         state.age, action, reduced, space);
    std::vector<Transition> out;
    for (int r = 0; r < static_cast<int>(pmf.size()); ++r) {
        if (pmf[r] <= 0.0) continue;
        for (int i = 0; i < n; ++i)
            out.push_back({static_cast<std::size_t>(r) * space.reduced_size() + reduced[i].next_reduced,
                           pmf[r] * reduced[i].prob});
    }
    return out;
}

SensorModel::SensorModel(SensorParams params, int delta_max)
    : params_(std::move(params)),
      space_(validated_users(params_), params_.battery_capacity, delta_max),
      pmf_(request_pmf(params_.request_probs)) {
    const std::size_t nred = space_.reduced_size();
    reduced_rows_.assign(nred * 2 * 2, ReducedTransition{0, 0.0});
    reduced_counts_.assign(nred * 2, 0);
    for (int b = 0; b <= space_.battery_capacity(); ++b) {
        for (int age = 1; age <= delta_max; ++age) {
            const std::size_t red = space_.reduced_index(b, age);
            for (int a = 0; a < 2; ++a) {
                reduced_counts_[2 * red + a] = static_cast<std::uint8_t>(battery_age_successors(
                    params_.harvest_rate, space_.battery_capacity(), delta_max, b, age, a,
                    &reduced_rows_[(2 * red + a) * 2], space_));
            }
        }
    }

    const std::size_t n = space_.size();
    cost_.resize(2 * n);
    row_offsets_.resize(2 * n + 1);
    row_offsets_[0] = 0;
    for (std::size_t s = 0; s < n; ++s) {
        const PerSensorState st = space_.state(s);
        const std::size_t red = space_.reduced_index(st.battery, st.age);
        for (int a = 0; a < 2; ++a) {
            cost_[2 * s + a] = per_sensor_cost(st, a, delta_max);
            for (std::size_t r = 0; r < pmf_.size(); ++r) {
                if (pmf_[r] <= 0.0) continue;
                for (const auto& t : reduced_row(red, a))
                    rows_.push_back({r * nred + t.next_reduced, pmf_[r] * t.prob});
            }
            row_offsets_[2 * s + a + 1] = rows_.size();
        }
    }
}

std::span<const ReducedTransition> SensorModel::reduced_row(std::size_t reduced, int action) const {
    const std::size_t slot = 2 * reduced + action;
    return {reduced_rows_.data() + slot * 2, reduced_counts_[slot]};
}

std::span<const Transition> SensorModel::row(std::size_t state, int action) const {
    const std::size_t slot = 2 * state + action;
    return {rows_.data() + row_offsets_[slot], row_offsets_[slot + 1] - row_offsets_[slot]};
}

NetworkModel::NetworkModel(NetworkConfig config) : config_(std::move(config)) {
    config_.validate();
    std::map<std::pair<double, std::pair<int, std::vector<double>>>, std::size_t> seen;
    type_of_.reserve(config_.sensors.size());
    for (const auto& s : config_.sensors) {
        auto key = std::make_pair(s.harvest_rate, std::make_pair(s.battery_capacity, s.request_probs));
        auto it = seen.find(key);
        if (it == seen.end()) {
            it = seen.emplace(key, types_.size()).first;
            types_.push_back(std::make_shared<const SensorModel>(s, config_.delta_max));
            type_counts_.push_back(0);
        }
        type_of_.push_back(it->second);
        ++type_counts_[it->second];
    }
}

}  // namespace aoi
