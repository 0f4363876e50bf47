#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "aoi/model.hpp"

namespace aoi {

// Joint action as a bitmask, bit k set when sensor k is commanded.
using JointAction = std::uint32_t;

inline int command_count(JointAction a) { return __builtin_popcount(a); }
inline int action_bit(JointAction a, int k) { return static_cast<int>((a >> k) & 1u); }

// Largest K the joint machinery accepts.
inline constexpr int kMaxJointSensors = 16;
// Largest product state space the exact solver will build.
inline constexpr std::size_t kMaxJointStates = 2'000'000;

class JointSizeError : public std::length_error {
public:
    using std::length_error::length_error;
};

/*
All K-tuples with at most M ones, in lexicographic tuple order (a_1 most significant).
Throws JointSizeError beyond kMaxJointSensors.
*/
std::vector<JointAction> enumerate_budget_actions(int num_sensors, int budget);

// Same set ordered for argmin tie-breaking: fewest commands first, then lowest sensor indices.
std::vector<JointAction> tie_break_order(std::vector<JointAction> actions);

// Mixed-radix product of per-sensor spaces, sensor 0 the most significant digit.
class JointModel {
public:
    // Throws JointSizeError when the product space exceeds kMaxJointStates.
    explicit JointModel(const NetworkModel& network);

    const NetworkModel& network() const { return *network_; }
    int num_sensors() const { return static_cast<int>(sensors_.size()); }
    const SensorModel& sensor(int k) const { return *sensors_[k]; }

    std::size_t size() const { return size_; }
    std::size_t reduced_size() const { return reduced_size_; }

    // Budget-feasible actions in tie-break order.
    const std::vector<JointAction>& actions() const { return actions_; }

    std::size_t index(std::span<const PerSensorState> states) const;
    std::vector<PerSensorState> states(std::size_t index) const;
    // Per-sensor state indices of a joint index.
    void digits(std::size_t index, std::span<std::size_t> out) const;
    std::size_t compose(std::span<const std::size_t> digits) const;

    std::size_t stride(int k) const { return strides_[k]; }
    std::size_t reduced_stride(int k) const { return reduced_strides_[k]; }

    // Normalized slot cost (1/NK) sum_k c_k.
    double cost(std::size_t index, JointAction a) const;

    // All sensors at (r=0, b=0, age=1).
    std::size_t reference_index() const;

private:
    const NetworkModel* network_;
    std::vector<const SensorModel*> sensors_;
    std::vector<std::size_t> strides_;
    std::vector<std::size_t> reduced_strides_;
    std::size_t size_ = 1;
    std::size_t reduced_size_ = 1;
    std::vector<JointAction> actions_;
    double cost_scale_ = 1.0;
};

}  // namespace aoi
