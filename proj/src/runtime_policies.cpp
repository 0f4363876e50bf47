#include "aoi/runtime_policies.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>

namespace aoi {

void relaxed_propose(std::span<const MixedPolicy> policies, std::span<const std::size_t> state_index, Rng& rng,
                     std::vector<int>& out) {
    const int K = static_cast<int>(policies.size());
    for (int k = 0; k < K; ++k) {
        const auto& p = policies[k];
        const std::size_t s = state_index[k];
        int a = p.lower[s];
        // a draw is spent only where the two tables disagree
        if (a != p.upper[s] && !(uniform01(rng) < p.eta)) a = p.upper[s];
        if (a) out.push_back(k);
    }
}

void truncate(std::vector<int>& proposals, int budget, Rng& rng) {
    const std::size_t m = static_cast<std::size_t>(std::max(budget, 0));
    if (proposals.size() > m) {
        const std::size_t n = proposals.size();
        for (std::size_t i = 0; i < m; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, n - 1);
            std::swap(proposals[i], proposals[pick(rng)]);
        }
        proposals.resize(m);
    }
    std::sort(proposals.begin(), proposals.end());
}

std::vector<int> greedy_decide(std::span<const PerSensorState> states, int budget) {
    std::vector<int> w;
    for (int k = 0; k < static_cast<int>(states.size()); ++k)
        if (states[k].requests >= 1) w.push_back(k);
    const std::size_t m = std::min<std::size_t>(std::max(budget, 0), w.size());
    std::partial_sort(w.begin(), w.begin() + m, w.end(), [&](int x, int y) {
        if (states[x].age != states[y].age) return states[x].age > states[y].age;
        return x < y;
    });
    w.resize(m);
    std::sort(w.begin(), w.end());
    return w;
}

ExactRule::ExactRule(const NetworkModel& network, JointPolicy policy) : policy_(std::move(policy)) {
    const JointModel jm(network);
    if (policy_.actions.size() != jm.size()) throw ModelError("joint policy does not match the network");
    policy_.validate();
    for (int k = 0; k < jm.num_sensors(); ++k) strides_.push_back(jm.stride(k));
}

void ExactRule::decide(const DecisionContext& ctx, Decision& out) const {
    std::size_t s = 0;
    for (std::size_t k = 0; k < strides_.size(); ++k) s += ctx.state_index[k] * strides_[k];
    const JointAction a = policy_.actions[s];
    out.commands.clear();
    for (int k = 0; k < static_cast<int>(strides_.size()); ++k)
        if (action_bit(a, k)) out.commands.push_back(k);
    out.proposals = static_cast<int>(out.commands.size());
}

void RelaxedRule::decide(const DecisionContext& ctx, Decision& out) const {
    out.commands.clear();
    relaxed_propose(policies_, ctx.state_index, *ctx.rng, out.commands);
    out.proposals = static_cast<int>(out.commands.size());
}

void TruncatedRule::decide(const DecisionContext& ctx, Decision& out) const {
    out.commands.clear();
    relaxed_propose(policies_, ctx.state_index, *ctx.rng, out.commands);
    out.proposals = static_cast<int>(out.commands.size());
    truncate(out.commands, budget_, *ctx.rng);
}

void GreedyRule::decide(const DecisionContext& ctx, Decision& out) const {
    out.commands = greedy_decide(ctx.states, budget_);
    out.proposals = static_cast<int>(out.commands.size());
}

JointDecision truncated_joint_decision(const JointModel& model, std::span<const MixedPolicy> policies, int budget) {
    const int K = model.num_sensors();
    if (static_cast<int>(policies.size()) != K) throw ModelError("one mixed policy per sensor is required");
    std::vector<MixedPolicy> pol(policies.begin(), policies.end());
    return [&model, pol = std::move(pol), budget, K](std::size_t s, std::vector<std::pair<JointAction, double>>& out) {
        std::array<std::size_t, kMaxJointSensors> digit{};
        model.digits(s, digit);
        std::array<double, kMaxJointSensors> q{};
        for (int k = 0; k < K; ++k) q[k] = pol[k].command_probability(digit[k]);
        std::map<JointAction, double> dist;
        for (JointAction x = 0; x < (JointAction{1} << K); ++x) {
            double p = 1.0;
            for (int k = 0; k < K; ++k) p *= action_bit(x, k) ? q[k] : 1.0 - q[k];
            if (p == 0.0) continue;
            const int n = command_count(x);
            if (n <= budget) {
                dist[x] += p;
                continue;
            }
            // every M-subset of X is equally likely
            std::vector<JointAction> subsets;
            for (JointAction y = x;; y = (y - 1) & x) {
                if (command_count(y) == budget) subsets.push_back(y);
                if (y == 0) break;
            }
            for (JointAction y : subsets) dist[y] += p / static_cast<double>(subsets.size());
        }
        for (const auto& [a, p] : dist) out.emplace_back(a, p);
    };
}

}  // namespace aoi
