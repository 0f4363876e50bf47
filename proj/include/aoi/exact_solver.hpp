#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "aoi/joint.hpp"
#include "aoi/rvia.hpp"

namespace aoi {

// Deterministic joint policy: one budget-feasible action per joint state index.
struct JointPolicy {
    int num_sensors = 0;
    int budget = 0;
    std::vector<JointAction> actions;

    // Throws ModelError when a stored action breaks the budget.
    void validate() const;
    bool operator==(const JointPolicy&) const = default;
};

struct ExactSolution {
    JointPolicy policy;
    RviaResult rvia;
};

// Optimal budget-constrained joint policy by relative value iteration over the product space.
ExactSolution solve_exact(const NetworkModel& network, const RviaOptions& opts = {},
                          std::span<const double> initial_values = {});

// max_s |min_a [c + P h] - h(s) - g| for the solved h and g.
double bellman_residual(const JointModel& model, const RviaResult& rvia);

struct LongRunAverages {
    double cost = 0.0;          // normalized by NK
    double command_rate = 0.0;  // commands per sensor per slot
};

// Action distribution of a stationary randomized joint rule in one state.
using JointDecision = std::function<void(std::size_t state, std::vector<std::pair<JointAction, double>>& out)>;

// Exact long-run averages of a stationary joint rule via the stationary distribution of the joint chain.
LongRunAverages evaluate_joint(const JointModel& model, const JointDecision& decide);
LongRunAverages evaluate_joint(const JointModel& model, const JointPolicy& policy);

}  // namespace aoi
