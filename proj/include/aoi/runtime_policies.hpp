#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "aoi/exact_solver.hpp"
#include "aoi/joint.hpp"
#include "aoi/model.hpp"
#include "aoi/relaxed_solver.hpp"

namespace aoi {

using Rng = std::mt19937_64;

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct DecisionContext {
    std::int64_t slot = 0;
    std::span<const PerSensorState> states;
    std::span<const std::size_t> state_index;  // per-sensor SensorSpace index of states[k]
    Rng* rng = nullptr;                         // policy stream
};

struct Decision {
    std::vector<int> commands;  // sorted sensor indices
    int proposals = 0;          // |X(t)| before truncation
};

// Each sensor draws lower (prob eta) or upper table, then reads its action.
// Appends proposed sensors to `out` in increasing index order.
void relaxed_propose(std::span<const MixedPolicy> policies, std::span<const std::size_t> state_index, Rng& rng,
                     std::vector<int>& out);

// Uniform M-subset of the proposals when there are more than M; result sorted.
void truncate(std::vector<int>& proposals, int budget, Rng& rng);

// Up to M requested sensors (r >= 1) with the largest age, ties to the lower index.
std::vector<int> greedy_decide(std::span<const PerSensorState> states, int budget);

class DecisionRule {
public:
    virtual ~DecisionRule() = default;
    virtual std::string name() const = 0;
    // Whether every decision must respect the per-slot budget.
    virtual bool budgeted() const = 0;
    virtual void decide(const DecisionContext& ctx, Decision& out) const = 0;
};

class ExactRule : public DecisionRule {
public:
    ExactRule(const NetworkModel& network, JointPolicy policy);
    std::string name() const override { return "exact"; }
    bool budgeted() const override { return true; }
    void decide(const DecisionContext& ctx, Decision& out) const override;

private:
    JointPolicy policy_;
    std::vector<std::size_t> strides_;
};

// Pure relaxed policy: proposals are executed as is, so the budget holds only on average.
class RelaxedRule : public DecisionRule {
public:
    explicit RelaxedRule(std::vector<MixedPolicy> policies) : policies_(std::move(policies)) {}
    std::string name() const override { return "relaxed"; }
    bool budgeted() const override { return false; }
    void decide(const DecisionContext& ctx, Decision& out) const override;

private:
    std::vector<MixedPolicy> policies_;
};

class TruncatedRule : public DecisionRule {
public:
    TruncatedRule(std::vector<MixedPolicy> policies, int budget) : policies_(std::move(policies)), budget_(budget) {}
    std::string name() const override { return "rtt"; }
    bool budgeted() const override { return true; }
    void decide(const DecisionContext& ctx, Decision& out) const override;

private:
    std::vector<MixedPolicy> policies_;
    int budget_;
};

class GreedyRule : public DecisionRule {
public:
    explicit GreedyRule(int budget) : budget_(budget) {}
    std::string name() const override { return "greedy"; }
    bool budgeted() const override { return true; }
    void decide(const DecisionContext& ctx, Decision& out) const override;

private:
    int budget_;
};

// Exact action distribution of relax-then-truncate in one joint state, for evaluate_joint.
// Enumerates all proposal sets, so only meant for small K.
JointDecision truncated_joint_decision(const JointModel& model, std::span<const MixedPolicy> policies, int budget);

}  // namespace aoi
