// Serial reference vs OpenMP for the hot loops. Run with --benchmark_filter to pick one.

#include <benchmark/benchmark.h>

#include <random>

#include "aoi/kernels.hpp"
#include "aoi/relaxed_solver.hpp"
#include "aoi/runtime_policies.hpp"
#include "aoi/simulator.hpp"

using namespace aoi;

namespace {

kernels::Exec exec_of(const benchmark::State& state) {
    return state.range(0) ? kernels::Exec::parallel : kernels::Exec::serial;
}

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

NetworkConfig fleet(int K, int M, int delta_max, int battery) {
    NetworkConfig c;
    c.num_users = 3;
    c.budget = M;
    c.delta_max = delta_max;
    for (int k = 0; k < K; ++k) c.sensors.push_back(SensorParams{0.01 * (1 + k % 10), battery, {0.6, 0.6, 0.6}});
    return c;
}

void BM_SensorSweep(benchmark::State& state) {
    const SensorModel m(SensorParams{0.05, 7, {0.6, 0.6, 0.6}}, 64);
    const auto h = random_values(m.space().size(), 1);
    std::vector<double> v(h.size());
    std::vector<std::uint8_t> act(h.size());
    kernels::SweepScratch scratch;
    for (auto _ : state) {
        kernels::sensor_sweep(exec_of(state), m, 100.0, h, v, act, scratch);
        benchmark::DoNotOptimize(v.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(h.size()));
}
BENCHMARK(BM_SensorSweep)->Arg(0)->Arg(1)->ArgName("parallel");

void BM_JointSweep(benchmark::State& state) {
    const NetworkModel net(fleet(3, 1, 8, 2));
    const JointModel jm(net);
    const auto h = random_values(jm.size(), 2);
    std::vector<double> v(h.size());
    std::vector<JointAction> act(h.size());
    kernels::SweepScratch scratch;
    for (auto _ : state) {
        kernels::joint_sweep(exec_of(state), jm, h, v, act, scratch);
        benchmark::DoNotOptimize(v.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(h.size()));
}
BENCHMARK(BM_JointSweep)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_Spmv(benchmark::State& state) {
    // banded random matrix, a stand-in for a transposed transition matrix
    const std::size_t n = 200000, band = 8;
    kernels::CsrMatrix m;
    m.n = n;
    m.offsets.push_back(0);
    std::mt19937_64 rng(3);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < band; ++j) {
            m.cols.push_back(static_cast<std::uint32_t>((i + j * 977) % n));
            m.vals.push_back(std::uniform_real_distribution<double>(0.0, 1.0)(rng));
        }
        m.offsets.push_back(m.cols.size());
    }
    const auto x = random_values(n, 4);
    std::vector<double> out(n);
    for (auto _ : state) {
        kernels::spmv(exec_of(state), m, x, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.vals.size()));
}
BENCHMARK(BM_Spmv)->Arg(0)->Arg(1)->ArgName("parallel");

void BM_Episodes(benchmark::State& state) {
    const NetworkModel net(fleet(40, 1, 64, 7));
    RelaxedOptions ro;
    const auto sol = solve_relaxed(net, ro);
    const TruncatedRule rule(sol.policies, 1);
    SimOptions so;
    so.horizon = 20000;
    so.episodes = 4;
    so.exec = exec_of(state);
    for (auto _ : state) benchmark::DoNotOptimize(run_experiment(net, rule, so).cost);
    state.SetItemsProcessed(state.iterations() * so.horizon * so.episodes);
}
BENCHMARK(BM_Episodes)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
