#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aoi/model.hpp"
#include "aoi/relaxed_solver.hpp"
#include "aoi/simulator.hpp"

namespace aoi {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/*
Flat "key = value" experiment description; '#' starts a comment. Lists are comma separated,
request_probs rows are separated by ';'. See README for the key table.
*/
struct ExperimentSpec {
    int num_sensors = 40;
    int num_users = 3;
    std::optional<int> budget;     // exactly one of budget / gamma
    std::optional<double> gamma;
    int delta_max = 64;
    int battery_capacity = 7;
    // one row for all sensors or one row per sensor; a row is one value for all users or one per user
    std::vector<std::vector<double>> request_probs{{0.6}};
    std::string harvest_rule = "round_robin";
    std::vector<double> harvest_set{0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.1};
    std::vector<double> harvest_rates;  // explicit per-sensor rates, overrides the rule
    std::vector<std::string> policies{"rtt", "greedy"};
    std::int64_t horizon = 1'000'000;
    int episodes = 50;
    std::uint64_t seed = 1;
    double theta = 1e-7;
    double epsilon = 1e-4;
    double eta_tol = 1e-6;
    int max_iterations = 100000;
    std::vector<int> sweep_k;
    std::vector<double> sweep_gamma;
    std::string out_dir = ".";

    bool operator==(const ExperimentSpec&) const = default;

    // Gamma given directly or as budget / num_sensors.
    double effective_gamma() const;
    void validate() const;
};

ExperimentSpec parse_spec(const std::string& text);
ExperimentSpec load_spec(const std::string& path);
std::string serialize_spec(const ExperimentSpec& spec);

// FNV-1a over the canonical serialization with out_dir ignored, 16 hex digits.
std::string spec_hash(const ExperimentSpec& spec);

// Network for the config, optionally at another K or gamma (used by sweeps). Throws ConfigError when
// gamma * K is not an integer.
NetworkConfig build_network(const ExperimentSpec& spec, std::optional<int> num_sensors = std::nullopt,
                            std::optional<double> gamma = std::nullopt);

// lambda_k = set[k mod |set|]
std::vector<double> round_robin_rates(const std::vector<double>& set, int num_sensors);

RelaxedOptions relaxed_options(const ExperimentSpec& spec);
SimOptions sim_options(const ExperimentSpec& spec);

// Build tag baked in at configure time (git describe), "unknown" otherwise.
const char* build_tag();

}  // namespace aoi
