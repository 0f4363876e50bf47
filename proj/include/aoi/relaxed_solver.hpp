#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "aoi/markov.hpp"
#include "aoi/model.hpp"
#include "aoi/rvia.hpp"

namespace aoi {

// Deterministic per-sensor policy over SensorSpace indices.
struct PolicyTable {
    std::vector<std::uint8_t> actions;
    double mu = 0.0;  // multiplier it was solved at

    std::size_t size() const { return actions.size(); }
    int operator[](std::size_t s) const { return actions[s]; }
    bool operator==(const PolicyTable&) const = default;
};

/*
Per-decision randomization between two deterministic tables: in every slot the
lower-multiplier table acts with probability eta, the upper one with 1 - eta.
*/
struct MixedPolicy {
    PolicyTable lower;
    PolicyTable upper;
    double eta = 1.0;

    static MixedPolicy pure(PolicyTable table) { return {table, table, 1.0}; }
    double command_probability(std::size_t s) const { return eta * lower[s] + (1.0 - eta) * upper[s]; }
    bool operator==(const MixedPolicy&) const = default;
};

struct PerSensorSolution {
    PolicyTable policy;
    RviaResult rvia;  // rvia.average_cost is the optimal per-sensor Lagrangian L*_k(mu)
};

// Per-sensor RVIA under the cost c_k + mu * a.
PerSensorSolution solve_per_sensor(const SensorModel& model, double mu, const RviaOptions& opts = {},
                                   std::span<const double> initial_values = {});

// Long-run per-sensor averages (cost is the raw c_k, not normalized, without mu).
struct SensorAverages {
    double cost = 0.0;
    double command_rate = 0.0;
};

SparseChain policy_chain(const SensorModel& model, const MixedPolicy& policy);

// Exact averages from the stationary distribution; throws MultichainError for multichain policies.
SensorAverages evaluate_per_sensor(const SensorModel& model, const PolicyTable& policy);
SensorAverages evaluate_per_sensor(const SensorModel& model, const MixedPolicy& policy);

class BisectionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RelaxedOptions {
    RviaOptions rvia;
    double epsilon = 1e-4;          // bisection width on mu
    double eta_tolerance = 1e-6;    // |J(eta) - Gamma| target
    double equality_tolerance = 1e-6;
    double monotone_tolerance = 1e-9;
    // Start each RVIA from the relative values of the closest multiplier already solved.
    bool warm_start = true;
    // Sees every per-sensor solve: (sensor type, solution).
    std::function<void(std::size_t, const PerSensorSolution&)> observer;
};

// One evaluated multiplier on the bisection path.
struct DualPoint {
    double mu = 0.0;
    double command_rate = 0.0;       // J(mu), averaged over sensors
    double lagrangian_sum = 0.0;     // sum_k L*_k(mu)
    double cost = 0.0;               // normalized relaxed cost of the mu-optimal policy
};

struct RelaxedSolution {
    std::vector<MixedPolicy> policies;  // one per sensor
    double lower_bound = 0.0;           // normalized average cost of the relaxed policy
    double command_rate = 0.0;          // its J
    double gamma = 0.0;
    bool constraint_active = false;
    bool mixed = false;                 // true when eta is in use
    bool eta_grid_fallback = false;
    double mu_star = 0.0;
    double mu_lower = 0.0;
    double mu_upper = 0.0;
    double eta = 1.0;
    std::vector<DualPoint> trajectory;
    // Per sensor type: solutions at the lower and upper multipliers.
    std::vector<PerSensorSolution> lower_solutions;
    std::vector<PerSensorSolution> upper_solutions;
};

// Relaxed CMDP: per-sensor RVIA, bisection on mu, eta mixing to meet the average budget.
RelaxedSolution solve_relaxed(const NetworkModel& network, const RelaxedOptions& opts = {});

// Initial upper end of the multiplier bracket, N * delta_max^2.
double multiplier_ceiling(const NetworkConfig& config);

}  // namespace aoi
