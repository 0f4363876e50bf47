#include "aoi/kernels.hpp"

#include <array>

namespace aoi::kernels {

namespace {

using Digits = std::array<std::size_t, kMaxJointSensors>;

// ---- per-sensor pieces ----

inline double sensor_marginal(const SensorModel& model, std::span<const double> h, std::size_t u) {
    const std::size_t nred = model.space().reduced_size();
    const auto pmf = model.requests();
    double acc = 0.0;
    for (std::size_t r = 0; r < pmf.size(); ++r) acc += pmf[r] * h[r * nred + u];
    return acc;
}

inline double sensor_expected(const SensorModel& model, std::span<const double> marginal, std::size_t u, int a) {
    double acc = 0.0;
    for (const auto& t : model.reduced_row(u, a)) acc += t.prob * marginal[t.next_reduced];
    return acc;
}

// s = r * reduced_size + u
inline void sensor_update(const SensorModel& model, double mu, std::span<const double> expected, std::size_t s,
                          std::size_t u, double& v, std::uint8_t& act) {
    const double q0 = model.cost(s, 0) + expected[2 * u];
    const double q1 = model.cost(s, 1) + mu + expected[2 * u + 1];
    if (q1 < q0) {
        v = q1;
        act = 1;
    } else {
        v = q0;
        act = 0;
    }
}

// ---- joint pieces ----

inline void reduced_digits(const JointModel& model, std::size_t u, Digits& out) {
    for (int k = 0; k < model.num_sensors(); ++k)
        out[k] = (u / model.reduced_stride(k)) % model.sensor(k).space().reduced_size();
}

inline double joint_marginal(const JointModel& model, std::span<const double> h, std::size_t u) {
    const int K = model.num_sensors();
    Digits ud{}, r{};
    reduced_digits(model, u, ud);
    double acc = 0.0;
    while (true) {
        double w = 1.0;
        std::size_t full = 0;
        for (int k = 0; k < K; ++k) {
            const auto& sm = model.sensor(k);
            w *= sm.requests()[r[k]];
            full += (r[k] * sm.space().reduced_size() + ud[k]) * model.stride(k);
        }
        acc += w * h[full];
        int k = K - 1;
        for (; k >= 0; --k) {
            if (++r[k] <= static_cast<std::size_t>(model.sensor(k).num_users())) break;
            r[k] = 0;
        }
        if (k < 0) break;
    }
    return acc;
}

inline double joint_expected(const JointModel& model, std::span<const double> marginal, std::size_t u,
                             JointAction a) {
    const int K = model.num_sensors();
    Digits ud{}, pick{};
    reduced_digits(model, u, ud);
    std::array<std::span<const ReducedTransition>, kMaxJointSensors> rows;
    for (int k = 0; k < K; ++k) rows[k] = model.sensor(k).reduced_row(ud[k], action_bit(a, k));
    double acc = 0.0;
    while (true) {
        double w = 1.0;
        std::size_t next = 0;
        for (int k = 0; k < K; ++k) {
            const auto& t = rows[k][pick[k]];
            w *= t.prob;
            next += t.next_reduced * model.reduced_stride(k);
        }
        acc += w * marginal[next];
        int k = K - 1;
        for (; k >= 0; --k) {
            if (++pick[k] < rows[k].size()) break;
            pick[k] = 0;
        }
        if (k < 0) break;
    }
    return acc;
}

inline void joint_update(const JointModel& model, std::span<const double> expected, std::size_t s, double& v,
                         JointAction& act) {
    const int K = model.num_sensors();
    std::size_t u = 0;
    for (int k = 0; k < K; ++k) {
        const std::size_t d = (s / model.stride(k)) % model.sensor(k).space().size();
        u += (d % model.sensor(k).space().reduced_size()) * model.reduced_stride(k);
    }
    const auto& actions = model.actions();
    const std::size_t na = actions.size();
    double best = 0.0;
    JointAction best_a = 0;
    for (std::size_t i = 0; i < na; ++i) {
        const double q = model.cost(s, actions[i]) + expected[u * na + i];
        if (i == 0 || q < best) {
            best = q;
            best_a = actions[i];
        }
    }
    v = best;
    act = best_a;
}

void prepare(SweepScratch& scratch, std::size_t marginal, std::size_t expected) {
    scratch.marginal.resize(marginal);
    scratch.expected.resize(expected);
}

}  // namespace

namespace serial {

void sensor_sweep(const SensorModel& model, double mu, std::span<const double> h, std::span<double> v_out,
                  std::span<std::uint8_t> act_out, SweepScratch& scratch) {
    const std::size_t nred = model.space().reduced_size();
    prepare(scratch, nred, 2 * nred);
    for (std::size_t u = 0; u < nred; ++u) scratch.marginal[u] = sensor_marginal(model, h, u);
    for (std::size_t u = 0; u < nred; ++u)
        for (int a = 0; a < 2; ++a) scratch.expected[2 * u + a] = sensor_expected(model, scratch.marginal, u, a);
    const std::size_t nr = static_cast<std::size_t>(model.num_users()) + 1;
    for (std::size_t r = 0; r < nr; ++r)
        for (std::size_t u = 0; u < nred; ++u) {
            const std::size_t s = r * nred + u;
            sensor_update(model, mu, scratch.expected, s, u, v_out[s], act_out[s]);
        }
}

void joint_sweep(const JointModel& model, std::span<const double> h, std::span<double> v_out,
                 std::span<JointAction> act_out, SweepScratch& scratch) {
    const std::size_t R = model.reduced_size();
    const std::size_t na = model.actions().size();
    prepare(scratch, R, R * na);
    for (std::size_t u = 0; u < R; ++u) scratch.marginal[u] = joint_marginal(model, h, u);
    for (std::size_t u = 0; u < R; ++u)
        for (std::size_t i = 0; i < na; ++i)
            scratch.expected[u * na + i] = joint_expected(model, scratch.marginal, u, model.actions()[i]);
    for (std::size_t s = 0; s < model.size(); ++s) joint_update(model, scratch.expected, s, v_out[s], act_out[s]);
}

void spmv(const CsrMatrix& m, std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < m.n; ++i) {
        double acc = 0.0;
        for (std::size_t j = m.offsets[i]; j < m.offsets[i + 1]; ++j) acc += m.vals[j] * x[m.cols[j]];
        out[i] = acc;
    }
}

}  // namespace serial

namespace parallel {

void sensor_sweep(const SensorModel& model, double mu, std::span<const double> h, std::span<double> v_out,
                  std::span<std::uint8_t> act_out, SweepScratch& scratch) {
    const auto nred = static_cast<std::ptrdiff_t>(model.space().reduced_size());
    const auto nr = static_cast<std::ptrdiff_t>(model.num_users()) + 1;
    prepare(scratch, nred, 2 * nred);
    auto& marginal = scratch.marginal;
    auto& expected = scratch.expected;
#pragma omp parallel
    {
#pragma omp for schedule(static)
        for (std::ptrdiff_t u = 0; u < nred; ++u) marginal[u] = sensor_marginal(model, h, u);
#pragma omp for schedule(static)
        for (std::ptrdiff_t u = 0; u < nred; ++u)
            for (int a = 0; a < 2; ++a) expected[2 * u + a] = sensor_expected(model, marginal, u, a);
#pragma omp for collapse(2) schedule(static)
        for (std::ptrdiff_t r = 0; r < nr; ++r)
            for (std::ptrdiff_t u = 0; u < nred; ++u) {
                const std::size_t s = r * nred + u;
                sensor_update(model, mu, expected, s, u, v_out[s], act_out[s]);
            }
    }
}

void joint_sweep(const JointModel& model, std::span<const double> h, std::span<double> v_out,
                 std::span<JointAction> act_out, SweepScratch& scratch) {
    const auto R = static_cast<std::ptrdiff_t>(model.reduced_size());
    const auto S = static_cast<std::ptrdiff_t>(model.size());
    const std::size_t na = model.actions().size();
    prepare(scratch, R, R * na);
    auto& marginal = scratch.marginal;
    auto& expected = scratch.expected;
#pragma omp parallel
    {
#pragma omp for schedule(static)
        for (std::ptrdiff_t u = 0; u < R; ++u) marginal[u] = joint_marginal(model, h, u);
#pragma omp for schedule(static)
        for (std::ptrdiff_t u = 0; u < R; ++u)
            for (std::size_t i = 0; i < na; ++i)
                expected[u * na + i] = joint_expected(model, marginal, u, model.actions()[i]);
#pragma omp for schedule(static)
        for (std::ptrdiff_t s = 0; s < S; ++s) joint_update(model, expected, s, v_out[s], act_out[s]);
    }
}

void spmv(const CsrMatrix& m, std::span<const double> x, std::span<double> out) {
    const auto n = static_cast<std::ptrdiff_t>(m.n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = m.offsets[i]; j < m.offsets[i + 1]; ++j) acc += m.vals[j] * x[m.cols[j]];
        out[i] = acc;
    }
}

}  // namespace parallel

void sensor_sweep(Exec exec, const SensorModel& model, double mu, std::span<const double> h,
                  std::span<double> v_out, std::span<std::uint8_t> act_out, SweepScratch& scratch) {
    if (exec == Exec::parallel)
        parallel::sensor_sweep(model, mu, h, v_out, act_out, scratch);
    else
        serial::sensor_sweep(model, mu, h, v_out, act_out, scratch);
}

void joint_sweep(Exec exec, const JointModel& model, std::span<const double> h, std::span<double> v_out,
                 std::span<JointAction> act_out, SweepScratch& scratch) {
    if (exec == Exec::parallel)
        parallel::joint_sweep(model, h, v_out, act_out, scratch);
    else
        serial::joint_sweep(model, h, v_out, act_out, scratch);
}

void spmv(Exec exec, const CsrMatrix& m, std::span<const double> x, std::span<double> out) {
    if (exec == Exec::parallel)
        parallel::spmv(m, x, out);
    else
        serial::spmv(m, x, out);
}

}  // namespace aoi::kernels
