#include "aoi/joint.hpp"

#include <algorithm>
#include <string>

namespace aoi {

std::vector<JointAction> enumerate_budget_actions(int num_sensors, int budget) {
    if (num_sensors < 1 || num_sensors > kMaxJointSensors)
        throw JointSizeError("joint action enumeration supports 1 <= K <= " + std::to_string(kMaxJointSensors) +
                             ", got K=" + std::to_string(num_sensors));
    if (budget < 1 || budget > num_sensors) throw ModelError("budget must satisfy 1 <= M <= K");
    // Tuple (a_1..a_K) read as a binary number with a_1 as the top bit gives the lexicographic order.
    std::vector<JointAction> out;
    const std::uint32_t total = 1u << num_sensors;
    for (std::uint32_t word = 0; word < total; ++word) {
        JointAction mask = 0;
        for (int k = 0; k < num_sensors; ++k)
            if ((word >> (num_sensors - 1 - k)) & 1u) mask |= 1u << k;
        if (command_count(mask) <= budget) out.push_back(mask);
    }
    return out;
}

std::vector<JointAction> tie_break_order(std::vector<JointAction> actions) {
    std::stable_sort(actions.begin(), actions.end(), [](JointAction x, JointAction y) {
        if (command_count(x) != command_count(y)) return command_count(x) < command_count(y);
        // Equal counts: compare sorted index lists; the first differing index decides.
        const JointAction diff = x ^ y;
        if (diff == 0) return false;
        const JointAction lowest = diff & (~diff + 1);
        return (x & lowest) != 0;
    });
    return actions;
}

JointModel::JointModel(const NetworkModel& network) : network_(&network) {
    const int K = network.num_sensors();
    if (K > kMaxJointSensors)
        throw JointSizeError("exact solver supports at most " + std::to_string(kMaxJointSensors) + " sensors");
    sensors_.reserve(K);
    for (int k = 0; k < K; ++k) sensors_.push_back(&network.sensor(k));

    strides_.assign(K, 1);
    reduced_strides_.assign(K, 1);
    for (int k = K - 1; k >= 0; --k) {
        strides_[k] = size_;
        reduced_strides_[k] = reduced_size_;
        const std::size_t n = sensors_[k]->space().size();
        if (size_ > kMaxJointStates / n)
            throw JointSizeError("joint state space exceeds the cap of " + std::to_string(kMaxJointStates) +
                                 " states; use the relaxed solver for this instance");
        size_ *= n;
        reduced_size_ *= sensors_[k]->space().reduced_size();
    }
    actions_ = tie_break_order(enumerate_budget_actions(K, network.config().budget));
    cost_scale_ = 1.0 / (static_cast<double>(network.config().num_users) * K);
}

std::size_t JointModel::index(std::span<const PerSensorState> states) const {
    if (static_cast<int>(states.size()) != num_sensors()) throw ModelError("joint state has wrong length");
    std::size_t idx = 0;
    for (int k = 0; k < num_sensors(); ++k) idx += sensors_[k]->space().index(states[k]) * strides_[k];
    return idx;
}

std::vector<PerSensorState> JointModel::states(std::size_t index) const {
    if (index >= size_) throw ModelError("joint state index out of range");
    std::vector<PerSensorState> out(num_sensors());
    for (int k = 0; k < num_sensors(); ++k) out[k] = sensors_[k]->space().state((index / strides_[k]) % sensors_[k]->space().size());
    return out;
}

void JointModel::digits(std::size_t index, std::span<std::size_t> out) const {
    for (int k = 0; k < num_sensors(); ++k) out[k] = (index / strides_[k]) % sensors_[k]->space().size();
}

std::size_t JointModel::compose(std::span<const std::size_t> digits) const {
    std::size_t idx = 0;
    for (int k = 0; k < num_sensors(); ++k) idx += digits[k] * strides_[k];
    return idx;
}

double JointModel::cost(std::size_t index, JointAction a) const {
    double total = 0.0;
    for (int k = 0; k < num_sensors(); ++k) {
        const std::size_t d = (index / strides_[k]) % sensors_[k]->space().size();
        total += sensors_[k]->cost(d, action_bit(a, k));
    }
    return total * cost_scale_;
}

std::size_t JointModel::reference_index() const {
    std::size_t idx = 0;
    for (int k = 0; k < num_sensors(); ++k) idx += sensors_[k]->space().reference_index() * strides_[k];
    return idx;
}

}  // namespace aoi
