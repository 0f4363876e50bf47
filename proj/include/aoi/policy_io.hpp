#pragma once

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "aoi/exact_solver.hpp"
#include "aoi/relaxed_solver.hpp"

namespace aoi {

class PolicyFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shortest decimal form that parses back to the same double.
std::string format_double(double x);
double parse_double(const std::string& text);

// CSV: "# aoi-joint-policy v1", "# sensors=K budget=M states=S", "state,bits", then one row per joint
// state; bits[k] is the command bit of sensor k.
void write_joint_policy(std::ostream& os, const JointPolicy& policy);
JointPolicy read_joint_policy(std::istream& is);

// Solved relaxed policies as consumed by the runtime rules.
struct MixedPolicySet {
    std::vector<MixedPolicy> policies;  // one per sensor
    double lower_bound = 0.0;
    double command_rate = 0.0;
    double mu_star = 0.0;
    bool constraint_active = false;

    bool operator==(const MixedPolicySet&) const = default;
};

MixedPolicySet to_policy_set(const RelaxedSolution& solution);

// CSV: "# aoi-mixed-policy v1", "# key=value" metadata lines, "sensor,eta,mu_lower,mu_upper,lower,upper",
// then one row per sensor with both tables as 0/1 strings in state-index order.
void write_mixed_policies(std::ostream& os, const MixedPolicySet& set);
MixedPolicySet read_mixed_policies(std::istream& is);

}  // namespace aoi
