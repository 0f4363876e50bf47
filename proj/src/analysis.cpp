#include "aoi/analysis.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "aoi/markov.hpp"

namespace aoi {

std::string OrderingReport::diagnostic() const {
    std::ostringstream os;
    os.precision(10);
    os << "lower=" << lower_bound << " exact=" << exact << " rtt_exact=" << rtt_exact << " rtt_mc=" << rtt.cost
       << " (se " << rtt.cost_se << ") greedy_mc=" << greedy.cost << " (se " << greedy.cost_se << ")";
    if (!lower_le_exact) os << " lower bound exceeds the optimum";
    if (!exact_le_rtt) os << " optimum exceeds relax-then-truncate beyond noise";
    return os.str();
}

OrderingReport check_ordering(const NetworkModel& network, const OrderingOptions& opts) {
    OrderingReport rep;
    const auto relaxed = solve_relaxed(network, opts.relaxed);
    rep.lower_bound = relaxed.lower_bound;

    const JointModel jm(network);
    const auto exact = solve_exact(network, opts.relaxed.rvia);
    rep.exact = exact.rvia.average_cost;
    try {
        rep.rtt_exact =
            evaluate_joint(jm, truncated_joint_decision(jm, relaxed.policies, network.config().budget)).cost;
    } catch (const MultichainError&) {
        rep.rtt_exact = std::numeric_limits<double>::quiet_NaN();
    }

    const TruncatedRule rtt(relaxed.policies, network.config().budget);
    rep.rtt = run_experiment(network, rtt, opts.sim);
    const GreedyRule greedy(network.config().budget);
    rep.greedy = run_experiment(network, greedy, opts.sim);

    rep.lower_le_exact = rep.lower_bound <= rep.exact + opts.exact_tolerance;
    rep.exact_le_rtt = rep.exact <= rep.rtt.cost + opts.se_multiple * rep.rtt.cost_se;
    return rep;
}

GapReport check_gap_bound(int delta_max, int budget, double lower_bound, double rtt_cost, double cost_se, double mad,
                          double se_multiple) {
    GapReport rep;
    rep.gap = rtt_cost - lower_bound;
    rep.mad = mad;
    rep.bound = static_cast<double>(delta_max) / budget * mad;
    rep.slack = rep.bound + se_multiple * cost_se - rep.gap;
    rep.pass = rep.slack >= 0.0;
    return rep;
}

SqrtKReport check_sqrtK_mad(std::vector<SqrtKPoint> points, int delta_max, double gamma, double se_multiple) {
    SqrtKReport rep;
    if (points.empty()) return rep;
    std::size_t largest = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double root = std::sqrt(static_cast<double>(points[i].num_sensors));
        rep.ratio.push_back(points[i].mad / root);
        rep.envelope.push_back(delta_max / (gamma * root));
        if (points[i].num_sensors > points[largest].num_sensors) largest = i;
    }
    const double root = std::sqrt(static_cast<double>(points[largest].num_sensors));
    rep.pass = rep.ratio[largest] <= 1.0 + se_multiple * points[largest].mad_se / root;
    return rep;
}

RegionMap command_region_map(const SensorModel& model, const PolicyTable& policy, int requests) {
    const auto& sp = model.space();
    if (requests < 0 || requests > sp.num_users()) throw ModelError("request count out of range");
    RegionMap map;
    map.requests = requests;
    const int B = sp.battery_capacity(), D = sp.delta_max();
    map.cells.assign(B + 1, std::vector<int>(D, 0));
    for (int b = 0; b <= B; ++b)
        for (int age = 1; age <= D; ++age) {
            const int a = policy[sp.index({requests, b, age})];
            map.cells[b][age - 1] = a;
            map.command_cells += a;
        }
    map.upward_closed_age = true;
    for (int b = 0; b <= B; ++b)
        for (int age = 1; age < D; ++age)
            if (map.cells[b][age - 1] > map.cells[b][age]) map.upward_closed_age = false;
    map.upward_closed_battery = true;
    for (int age = 1; age <= D; ++age)
        for (int b = 0; b < B; ++b)
            if (map.cells[b][age - 1] > map.cells[b + 1][age - 1]) map.upward_closed_battery = false;
    return map;
}

void write_region_csv(std::ostream& os, const RegionMap& map) {
    os << "battery";
    const int D = map.cells.empty() ? 0 : static_cast<int>(map.cells.front().size());
    for (int age = 1; age <= D; ++age) os << ",age" << age;
    os << '\n';
    for (std::size_t b = 0; b < map.cells.size(); ++b) {
        os << b;
        for (int a : map.cells[b]) os << ',' << a;
        os << '\n';
    }
}

StructureReport check_structure(const SensorModel& model, const PerSensorSolution& solution, double value_tolerance) {
    const auto& sp = model.space();
    const auto& h = solution.rvia.relative;
    const auto& pol = solution.policy;
    const int N = sp.num_users(), B = sp.battery_capacity(), D = sp.delta_max();
    StructureReport rep;
    rep.value_monotone_age = rep.threshold_age = rep.threshold_requests = rep.threshold_battery = true;
    auto note = [&](const std::string& what, int r, int b, int age) {
        if (rep.first_violation.empty())
            rep.first_violation = what + " at (r=" + std::to_string(r) + ", b=" + std::to_string(b) +
                                  ", age=" + std::to_string(age) + ")";
    };
    for (int r = 0; r <= N; ++r)
        for (int b = 0; b <= B; ++b)
            for (int age = 1; age <= D; ++age) {
                const std::size_t s = sp.index({r, b, age});
                if (age < D) {
                    const std::size_t up = sp.index({r, b, age + 1});
                    if (h[up] < h[s] - value_tolerance * std::max(1.0, std::abs(h[s]))) {
                        rep.value_monotone_age = false;
                        note("value decreases in age", r, b, age);
                    }
                    if (pol[s] > pol[up]) {
                        rep.threshold_age = false;
                        note("command region not upward-closed in age", r, b, age);
                    }
                }
                if (r < N && pol[s] > pol[sp.index({r + 1, b, age})]) rep.threshold_requests = false;
                if (b < B && pol[s] > pol[sp.index({r, b + 1, age})]) rep.threshold_battery = false;
            }
    return rep;
}

}  // namespace aoi
