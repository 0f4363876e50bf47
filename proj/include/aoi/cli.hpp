#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "aoi/experiment.hpp"
#include "aoi/simulator.hpp"

namespace aoi::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitCheckFailed = 2;

struct Options {
    std::string out_dir;                 // overrides the config's out_dir when set
    std::optional<std::uint64_t> seed;   // overrides the config's seed
    std::vector<std::string> policies;   // overrides the config's policy list
    std::string policy_file;             // joint policy for "exact"
    std::string mixed_file;              // mixed policies for "relaxed" / "rtt"
    int sensor = -1;                     // region-map: one sensor, default one per sensor type
    int requests = -1;                   // region-map: one request count, default all
    std::string table = "lower";         // region-map: lower or upper table
};

// Result CSV header shared by simulate and sweep.
extern const char* const kResultHeader;

struct ResultRow {
    std::string config_hash;
    std::string policy;
    int num_sensors = 0;
    int budget = 0;
    double gamma = 0.0;
    const SimReport* report = nullptr;
    std::optional<double> lower_bound;
    int episodes = 0;
    std::int64_t horizon = 0;
    std::uint64_t seed = 0;
};
void write_result_row(std::ostream& os, const ResultRow& row);

// Each command writes its artifacts under the output directory and a summary to `out`;
// the return value is the process exit code.
int solve_exact(const ExperimentSpec& spec, const Options& opts, std::ostream& out);
int solve_relaxed(const ExperimentSpec& spec, const Options& opts, std::ostream& out);
int simulate(const ExperimentSpec& spec, const Options& opts, std::ostream& out);
int sweep(const ExperimentSpec& spec, const Options& opts, std::ostream& out);
int analyze(const ExperimentSpec& spec, const Options& opts, std::ostream& out);
int region_map(const ExperimentSpec& spec, const Options& opts, std::ostream& out);

}  // namespace aoi::cli
