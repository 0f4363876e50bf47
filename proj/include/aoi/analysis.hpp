#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "aoi/exact_solver.hpp"
#include "aoi/relaxed_solver.hpp"
#include "aoi/simulator.hpp"

namespace aoi {

struct OrderingReport {
    double lower_bound = 0.0;    // relaxed optimum, exact
    double exact = 0.0;          // optimal joint policy, exact stationary evaluation
    double rtt_exact = 0.0;      // relax-then-truncate, exact stationary evaluation
    SimReport rtt;               // relax-then-truncate, Monte Carlo
    SimReport greedy;            // reported only
    bool lower_le_exact = false;
    bool exact_le_rtt = false;
    bool pass() const { return lower_le_exact && exact_le_rtt; }
    std::string diagnostic() const;
};

struct OrderingOptions {
    RelaxedOptions relaxed;
    SimOptions sim;
    double exact_tolerance = 1e-6;
    double se_multiple = 3.0;
};

// lower bound <= optimal <= relax-then-truncate; needs a joint space under the exact-solver cap.
OrderingReport check_ordering(const NetworkModel& network, const OrderingOptions& opts);

struct GapReport {
    double gap = 0.0;    // rtt cost - lower bound
    double bound = 0.0;  // (delta_max / M) * MAD
    double slack = 0.0;  // bound + se_multiple * SE - gap
    double mad = 0.0;
    bool pass = false;
};

// Gap bound with the lower bound standing in for the optimum. `mad` is MAD(|X(t)|) under the
// relaxed policy; `cost_se` is the standard error of the rtt cost.
GapReport check_gap_bound(int delta_max, int budget, double lower_bound, double rtt_cost, double cost_se, double mad,
                          double se_multiple = 3.0);

struct SqrtKPoint {
    int num_sensors = 0;
    double mad = 0.0;
    double mad_se = 0.0;
};

struct SqrtKReport {
    std::vector<double> ratio;     // MAD / sqrt(K) per point
    std::vector<double> envelope;  // delta_max / (gamma sqrt(K))
    bool pass = false;             // asserted on the largest K only
};

SqrtKReport check_sqrtK_mad(std::vector<SqrtKPoint> points, int delta_max, double gamma, double se_multiple = 3.0);

struct RegionMap {
    int requests = 0;
    std::vector<std::vector<int>> cells;  // [battery][age - 1]
    bool upward_closed_age = false;
    bool upward_closed_battery = false;
    int command_cells = 0;
};

RegionMap command_region_map(const SensorModel& model, const PolicyTable& policy, int requests);
void write_region_csv(std::ostream& os, const RegionMap& map);

struct StructureReport {
    bool value_monotone_age = false;   // V(r, b, age) non-decreasing in age
    bool threshold_age = false;        // command set upward-closed in age
    bool threshold_requests = false;   // report only
    bool threshold_battery = false;    // report only
    std::string first_violation;
};

StructureReport check_structure(const SensorModel& model, const PerSensorSolution& solution,
                                double value_tolerance = 1e-9);

}  // namespace aoi
