#include "aoi/relaxed_solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace aoi {

PerSensorSolution solve_per_sensor(const SensorModel& model, double mu, const RviaOptions& opts,
                                   std::span<const double> initial_values) {
    if (mu < 0.0) throw std::invalid_argument("Lagrange multiplier must be non-negative");
    kernels::SweepScratch scratch;
    PerSensorSolution out;
    out.policy.mu = mu;
    auto sweep = [&](std::span<const double> h, std::span<double> v, std::span<std::uint8_t> act) {
        kernels::sensor_sweep(opts.exec, model, mu, h, v, act, scratch);
    };
    out.rvia = relative_value_iteration<std::uint8_t>(model.space().size(), model.space().reference_index(), sweep,
                                                       opts, out.policy.actions, initial_values);
    return out;
}

SparseChain policy_chain(const SensorModel& model, const MixedPolicy& policy) {
    const std::size_t n = model.space().size();
    if (policy.lower.size() != n || policy.upper.size() != n)
        throw ModelError("policy table does not cover the per-sensor state space");
    SparseChain chain(n);
    for (std::size_t s = 0; s < n; ++s) {
        const int lo = policy.lower[s], up = policy.upper[s];
        if (lo == up) {
            for (const auto& t : model.row(s, lo)) chain.add(static_cast<std::uint32_t>(t.next), t.prob);
        } else {
            for (const auto& t : model.row(s, lo)) chain.add(static_cast<std::uint32_t>(t.next), policy.eta * t.prob);
            for (const auto& t : model.row(s, up))
                chain.add(static_cast<std::uint32_t>(t.next), (1.0 - policy.eta) * t.prob);
        }
        chain.end_row();
    }
    return chain;
}

SensorAverages evaluate_per_sensor(const SensorModel& model, const MixedPolicy& policy) {
    if (!(policy.eta >= 0.0 && policy.eta <= 1.0)) throw std::invalid_argument("mixing factor must lie in [0, 1]");
    const auto chain = policy_chain(model, policy);
    const auto pi = stationary_distribution(chain);
    SensorAverages out;
    for (std::size_t s = 0; s < pi.size(); ++s) {
        if (pi[s] == 0.0) continue;
        const double w_lo = policy.eta;
        const double w_up = 1.0 - policy.eta;
        out.cost += pi[s] * (w_lo * model.cost(s, policy.lower[s]) + w_up * model.cost(s, policy.upper[s]));
        out.command_rate += pi[s] * policy.command_probability(s);
    }
    return out;
}

SensorAverages evaluate_per_sensor(const SensorModel& model, const PolicyTable& policy) {
    return evaluate_per_sensor(model, MixedPolicy::pure(policy));
}

double multiplier_ceiling(const NetworkConfig& config) {
    return static_cast<double>(config.num_users) * config.delta_max * config.delta_max;
}

namespace {

struct MultiplierEval {
    double mu = 0.0;
    std::vector<PerSensorSolution> solutions;  // per type
    std::vector<SensorAverages> averages;      // per type
    DualPoint point;
};

class Coordinator {
public:
    Coordinator(const NetworkModel& network, const RelaxedOptions& opts) : net_(network), opts_(opts) {}

    MultiplierEval solve(double mu) {
        const std::size_t T = net_.num_types();
        MultiplierEval ev;
        ev.mu = mu;
        ev.solutions.resize(T);
        ev.averages.resize(T);
        const MultiplierEval* warm = opts_.warm_start ? nearest(mu) : nullptr;
        RviaOptions inner = opts_.rvia;
        const bool across_types = opts_.rvia.exec == kernels::Exec::parallel && T > 1;
        if (across_types) inner.exec = kernels::Exec::serial;

        std::vector<std::string> errors(T);
        auto work = [&](std::size_t t) {
            try {
                std::span<const double> init;
                if (warm) init = warm->solutions[t].rvia.values;
                ev.solutions[t] = solve_per_sensor(net_.type(t), mu, inner, init);
                ev.averages[t] = evaluate_per_sensor(net_.type(t), ev.solutions[t].policy);
            } catch (const std::exception& e) {
                errors[t] = e.what();
            }
        };
        if (across_types) {
            const auto nt = static_cast<std::ptrdiff_t>(T);
#pragma omp parallel for schedule(dynamic)
            for (std::ptrdiff_t t = 0; t < nt; ++t) work(static_cast<std::size_t>(t));
        } else {
            for (std::size_t t = 0; t < T; ++t) work(t);
        }
        for (const auto& e : errors)
            if (!e.empty()) throw std::runtime_error("per-sensor solve at mu=" + std::to_string(mu) + ": " + e);

        const int K = net_.num_sensors();
        const double nk = static_cast<double>(net_.config().num_users) * K;
        ev.point.mu = mu;
        for (std::size_t t = 0; t < T; ++t) {
            const double c = net_.type_counts()[t];
            ev.point.command_rate += c * ev.averages[t].command_rate;
            ev.point.cost += c * ev.averages[t].cost;
            ev.point.lagrangian_sum += c * ev.solutions[t].rvia.average_cost;
        }
        ev.point.command_rate /= K;
        ev.point.cost /= nk;
        if (opts_.observer)
            for (std::size_t t = 0; t < T; ++t) opts_.observer(t, ev.solutions[t]);
        trajectory_.push_back(ev.point);
        cache_.emplace(mu, ev);
        return ev;
    }

    const std::vector<DualPoint>& trajectory() const { return trajectory_; }

private:
    const MultiplierEval* nearest(double mu) const {
        if (cache_.empty()) return nullptr;
        auto it = cache_.lower_bound(mu);
        if (it == cache_.end()) return &std::prev(it)->second;
        if (it == cache_.begin()) return &it->second;
        auto prev = std::prev(it);
        return (mu - prev->first <= it->first - mu) ? &prev->second : &it->second;
    }

    const NetworkModel& net_;
    const RelaxedOptions& opts_;
    std::vector<DualPoint> trajectory_;
    std::map<double, MultiplierEval> cache_;
};

void check_monotone(std::vector<DualPoint> points, double tol) {
    std::sort(points.begin(), points.end(), [](const DualPoint& a, const DualPoint& b) { return a.mu < b.mu; });
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (points[i].command_rate > points[i - 1].command_rate + tol)
            throw BisectionError("command rate increases in mu between mu=" + std::to_string(points[i - 1].mu) +
                                 " and mu=" + std::to_string(points[i].mu));
        if (points[i].lagrangian_sum < points[i - 1].lagrangian_sum - tol * (1.0 + std::abs(points[i].lagrangian_sum)))
            throw BisectionError("per-sensor Lagrangian decreases in mu between mu=" +
                                 std::to_string(points[i - 1].mu) + " and mu=" + std::to_string(points[i].mu));
    }
}

struct MixEval {
    double command_rate = 0.0;
    double cost = 0.0;
};

MixEval evaluate_mixture(const NetworkModel& net, const std::vector<PerSensorSolution>& lower,
                         const std::vector<PerSensorSolution>& upper, double eta) {
    MixEval out;
    for (std::size_t t = 0; t < net.num_types(); ++t) {
        const MixedPolicy mp{lower[t].policy, upper[t].policy, eta};
        const auto avg = evaluate_per_sensor(net.type(t), mp);
        const double c = net.type_counts()[t];
        out.command_rate += c * avg.command_rate;
        out.cost += c * avg.cost;
    }
    out.command_rate /= net.num_sensors();
    out.cost /= static_cast<double>(net.config().num_users) * net.num_sensors();
    return out;
}

}  // namespace

RelaxedSolution solve_relaxed(const NetworkModel& network, const RelaxedOptions& opts) {
    if (!(opts.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    const NetworkConfig& cfg = network.config();
    Coordinator coord(network, opts);
    RelaxedSolution out;
    out.gamma = cfg.gamma();

    auto assign = [&](const std::vector<PerSensorSolution>& lo, const std::vector<PerSensorSolution>& up,
                      double eta) {
        out.policies.clear();
        for (int k = 0; k < network.num_sensors(); ++k) {
            const std::size_t t = network.type_of(k);
            out.policies.push_back(MixedPolicy{lo[t].policy, up[t].policy, eta});
        }
        out.lower_solutions = lo;
        out.upper_solutions = up;
        out.eta = eta;
    };

    MultiplierEval at_zero = coord.solve(0.0);
    if (at_zero.point.command_rate <= out.gamma) {
        assign(at_zero.solutions, at_zero.solutions, 1.0);
        out.constraint_active = false;
        out.lower_bound = at_zero.point.cost;
        out.command_rate = at_zero.point.command_rate;
        out.trajectory = coord.trajectory();
        return out;
    }

    out.constraint_active = true;
    MultiplierEval lower = std::move(at_zero);
    MultiplierEval upper = coord.solve(multiplier_ceiling(cfg));
    if (upper.point.command_rate > out.gamma)
        throw BisectionError("command rate at the bracket ceiling mu=" + std::to_string(upper.mu) +
                             " still exceeds the budget");
    while (upper.mu - lower.mu > opts.epsilon) {
        MultiplierEval mid = coord.solve(0.5 * (lower.mu + upper.mu));
        if (mid.point.command_rate >= out.gamma)
            lower = std::move(mid);
        else
            upper = std::move(mid);
    }
    out.mu_lower = lower.mu;
    out.mu_upper = upper.mu;
    out.mu_star = 0.5 * (lower.mu + upper.mu);
    MultiplierEval centre = coord.solve(out.mu_star);
    out.trajectory = coord.trajectory();
    check_monotone(out.trajectory, opts.monotone_tolerance);

    if (std::abs(centre.point.command_rate - out.gamma) <= opts.equality_tolerance) {
        assign(centre.solutions, centre.solutions, 1.0);
        out.lower_bound = centre.point.cost;
        out.command_rate = centre.point.command_rate;
        return out;
    }

    // Mix the bracket-end policies; J(1) = J(mu-) >= Gamma >= J(0) = J(mu+).
    out.mixed = true;
    double eta_lo = 0.0, eta_hi = 1.0;
    double j_lo = upper.point.command_rate, j_hi = lower.point.command_rate;
    double eta = 1.0;
    MixEval best{j_hi, lower.point.cost};
    bool monotone = true;
    for (int it = 0; it < 100; ++it) {
        eta = 0.5 * (eta_lo + eta_hi);
        best = evaluate_mixture(network, lower.solutions, upper.solutions, eta);
        if (best.command_rate < j_lo - 1e-12 || best.command_rate > j_hi + 1e-12) {
            monotone = false;
            break;
        }
        if (std::abs(best.command_rate - out.gamma) <= opts.eta_tolerance) break;
        if (best.command_rate > out.gamma) {
            eta_hi = eta;
            j_hi = best.command_rate;
        } else {
            eta_lo = eta;
            j_lo = best.command_rate;
        }
    }
    if (!monotone) {
        out.eta_grid_fallback = true;
        constexpr int grid = 10000;
        double best_gap = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= grid; ++i) {
            const double e = static_cast<double>(i) / grid;
            const auto m = evaluate_mixture(network, lower.solutions, upper.solutions, e);
            const double gap = std::abs(m.command_rate - out.gamma);
            if (gap < best_gap) {
                best_gap = gap;
                best = m;
                eta = e;
            }
        }
    }
    assign(lower.solutions, upper.solutions, eta);
    out.lower_bound = best.cost;
    out.command_rate = best.command_rate;
    return out;
}

}  // namespace aoi
