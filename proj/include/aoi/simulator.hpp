#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "aoi/kernels.hpp"
#include "aoi/model.hpp"
#include "aoi/runtime_policies.hpp"

namespace aoi {

struct SimOptions {
    std::int64_t horizon = 1'000'000;  // slots per episode
    int episodes = 50;
    std::uint64_t seed = 1;
    // Running-average cost is sampled every trace_interval slots; 0 picks horizon / 100.
    std::int64_t trace_interval = 0;
    kernels::Exec exec = kernels::Exec::parallel;
};

struct EpisodeMetrics {
    double cost = 0.0;           // normalized by N K T
    double command_rate = 0.0;   // commands per sensor per slot
    double proposal_mean = 0.0;  // mean |X(t)|
    double proposal_mad = 0.0;   // mean absolute deviation of |X(t)|
    int max_commands = 0;
    std::vector<double> trace;   // running-average cost at each trace point

    bool operator==(const EpisodeMetrics&) const = default;
};

struct SimReport {
    std::string policy;
    std::vector<EpisodeMetrics> episodes;
    double cost = 0.0;
    double cost_se = 0.0;
    double command_rate = 0.0;
    double command_rate_se = 0.0;
    double mad = 0.0;
    double mad_se = 0.0;
    double proposal_mean = 0.0;
    int max_commands = 0;
    std::vector<std::int64_t> trace_slots;  // slot counts at which traces were sampled
    std::vector<double> trace_mean;         // across-episode mean of the running averages
    double wall_seconds = 0.0;
};

// Episode e of a run seeded with `master`.
std::uint64_t episode_seed(std::uint64_t master, int episode);

// One episode from b = 0, age = delta_max. Throws std::logic_error if a budgeted rule
// exceeds M in some slot.
EpisodeMetrics run_episode(const NetworkModel& network, const DecisionRule& rule, std::int64_t horizon,
                           std::uint64_t seed, std::int64_t trace_interval = 0);

SimReport run_experiment(const NetworkModel& network, const DecisionRule& rule, const SimOptions& opts);

struct MadResult {
    double mean = 0.0;
    double mad = 0.0;
};

// Two-pass mean absolute deviation about the mean; throws std::invalid_argument on empty input.
MadResult mean_absolute_deviation(std::span<const double> samples);

// Exact MAD of a stream of small non-negative integers, kept as a histogram.
class CountMad {
public:
    void add(int value);
    std::int64_t count() const { return total_; }
    MadResult result() const;

private:
    std::vector<std::int64_t> hist_;
    std::int64_t total_ = 0;
};

// Mean and standard error (sample sd / sqrt(n)) of a list; se is 0 for a single value.
std::pair<double, double> mean_and_se(std::span<const double> xs);

}  // namespace aoi
