#include "aoi/exact_solver.hpp"

#include <array>
#include <cmath>

#include "aoi/markov.hpp"

namespace aoi {

void JointPolicy::validate() const {
    for (JointAction a : actions) {
        if (command_count(a) > budget) throw ModelError("joint policy action exceeds the transmission budget");
        if (num_sensors < 32 && (a >> num_sensors) != 0) throw ModelError("joint policy action names a missing sensor");
    }
}

ExactSolution solve_exact(const NetworkModel& network, const RviaOptions& opts, std::span<const double> initial_values) {
    const JointModel model(network);
    kernels::SweepScratch scratch;
    ExactSolution out;
    out.policy.num_sensors = model.num_sensors();
    out.policy.budget = network.config().budget;
    auto sweep = [&](std::span<const double> h, std::span<double> v, std::span<JointAction> act) {
        kernels::joint_sweep(opts.exec, model, h, v, act, scratch);
    };
    out.rvia = relative_value_iteration<JointAction>(model.size(), model.reference_index(), sweep, opts,
                                                      out.policy.actions, initial_values);
    return out;
}

double bellman_residual(const JointModel& model, const RviaResult& rvia) {
    kernels::SweepScratch scratch;
    std::vector<double> v(model.size());
    std::vector<JointAction> act(model.size());
    kernels::serial::joint_sweep(model, rvia.relative, v, act, scratch);
    double worst = 0.0;
    for (std::size_t s = 0; s < model.size(); ++s)
        worst = std::max(worst, std::abs(v[s] - rvia.relative[s] - rvia.average_cost));
    return worst;
}

LongRunAverages evaluate_joint(const JointModel& model, const JointDecision& decide) {
    const std::size_t n = model.size();
    const int K = model.num_sensors();
    SparseChain chain(n);
    std::vector<double> stage_cost(n, 0.0), stage_commands(n, 0.0);
    std::vector<std::pair<JointAction, double>> dist;
    std::array<std::size_t, kMaxJointSensors> digit{}, pick{};
    std::array<std::span<const Transition>, kMaxJointSensors> rows;

    for (std::size_t s = 0; s < n; ++s) {
        dist.clear();
        decide(s, dist);
        model.digits(s, digit);
        for (const auto& [a, w] : dist) {
            if (w <= 0.0) continue;
            stage_cost[s] += w * model.cost(s, a);
            stage_commands[s] += w * command_count(a) / K;
            for (int k = 0; k < K; ++k) {
                rows[k] = model.sensor(k).row(digit[k], action_bit(a, k));
                pick[k] = 0;
            }
            while (true) {
                double p = w;
                std::size_t next = 0;
                for (int k = 0; k < K; ++k) {
                    p *= rows[k][pick[k]].prob;
                    next += rows[k][pick[k]].next * model.stride(k);
                }
                chain.add(static_cast<std::uint32_t>(next), p);
                int k = K - 1;
                for (; k >= 0; --k) {
                    if (++pick[k] < rows[k].size()) break;
                    pick[k] = 0;
                }
                if (k < 0) break;
            }
        }
        chain.end_row();
    }

    const auto pi = stationary_distribution(chain);
    LongRunAverages out;
    for (std::size_t s = 0; s < n; ++s) {
        out.cost += pi[s] * stage_cost[s];
        out.command_rate += pi[s] * stage_commands[s];
    }
    return out;
}

LongRunAverages evaluate_joint(const JointModel& model, const JointPolicy& policy) {
    if (policy.actions.size() != model.size()) throw ModelError("joint policy does not cover the state space");
    return evaluate_joint(model, [&](std::size_t s, std::vector<std::pair<JointAction, double>>& out) {
        out.emplace_back(policy.actions[s], 1.0);
    });
}

}  // namespace aoi
