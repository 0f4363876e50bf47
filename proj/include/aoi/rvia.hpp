#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "aoi/kernels.hpp"

namespace aoi {

struct RviaOptions {
    double theta = 1e-7;            // span tolerance
    int max_iterations = 100000;
    kernels::Exec exec = kernels::Exec::serial;
    // Iterate on tau P + (1 - tau) I instead of P; same gain and optimal policies, but no periodic
    // oscillation of the span. 1 is plain relative value iteration.
    double aperiodicity = 1.0;
    // Rerun once with aperiodicity 0.5 when the plain iteration does not converge.
    bool aperiodic_fallback = true;
};

class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(int iterations, double span)
        : std::runtime_error("relative value iteration did not converge after " + std::to_string(iterations) +
                             " iterations (last span " + std::to_string(span) + ")"),
          iterations_(iterations),
          span_(span) {}
    int iterations() const { return iterations_; }
    double span() const { return span_; }

private:
    int iterations_;
    double span_;
};

struct RviaResult {
    std::vector<double> values;    // V
    std::vector<double> relative;  // h = V - V(ref)
    double average_cost = 0.0;     // V(ref)
    int iterations = 0;
    double span = 0.0;             // last span of V_new - V
    double aperiodicity = 1.0;     // tau actually used
};

/*
Relative value iteration with the span stopping rule.

`sweep(h, v_out, act_out)` performs one Bellman update. After convergence one more
sweep with the final h fills `actions` with the greedy policy. An empty `initial`
starts from V = 0.
*/
template <class Action, class Sweep>
RviaResult relative_value_iteration(std::size_t n, std::size_t reference, Sweep&& sweep, const RviaOptions& opts,
                                    std::vector<Action>& actions, std::span<const double> initial = {}) {
    if (!(opts.theta > 0.0)) throw std::invalid_argument("theta must be positive");
    const double tau = opts.aperiodicity;
    if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("aperiodicity must lie in (0, 1]");
    RviaResult res;
    res.aperiodicity = tau;
    res.values.assign(n, 0.0);
    if (!initial.empty()) {
        if (initial.size() != n) throw std::invalid_argument("initial value table has the wrong size");
        std::copy(initial.begin(), initial.end(), res.values.begin());
    }
    res.relative.resize(n);
    const double v_ref0 = res.values[reference];
    for (std::size_t s = 0; s < n; ++s) res.relative[s] = res.values[s] - v_ref0;

    std::vector<double> next(n);
    actions.resize(n);
    double span = std::numeric_limits<double>::infinity();
    int it = 0;
    while (it < opts.max_iterations) {
        ++it;
        sweep(std::span<const double>(res.relative), std::span<double>(next), std::span<Action>(actions));
        if (tau < 1.0)
            for (std::size_t s = 0; s < n; ++s) next[s] = tau * next[s] + (1.0 - tau) * res.relative[s];
        double hi = -std::numeric_limits<double>::infinity();
        double lo = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < n; ++s) {
            const double d = next[s] - res.values[s];
            hi = std::max(hi, d);
            lo = std::min(lo, d);
        }
        span = hi - lo;
        res.values.swap(next);
        const double v_ref = res.values[reference];
        for (std::size_t s = 0; s < n; ++s) res.relative[s] = res.values[s] - v_ref;
        if (span < opts.theta) break;
    }
    res.iterations = it;
    res.span = span;
    if (!(span < opts.theta)) {
        if (tau == 1.0 && opts.aperiodic_fallback) {
            RviaOptions retry = opts;
            retry.aperiodicity = 0.5;
            return relative_value_iteration<Action>(n, reference, sweep, retry, actions, initial);
        }
        throw NonConvergenceError(it, span);
    }
    sweep(std::span<const double>(res.relative), std::span<double>(next), std::span<Action>(actions));
    // with h(ref) = 0 the untransformed update at the reference is the gain
    res.average_cost = tau < 1.0 ? next[reference] : res.values[reference];
    return res;
}

}  // namespace aoi
