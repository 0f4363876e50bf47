#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "aoi/joint.hpp"
#include "aoi/model.hpp"

// Data-parallel inner loops. Every kernel has a serial reference and an OpenMP
// version with identical per-element arithmetic, so the two agree bit for bit.
namespace aoi::kernels {

enum class Exec { serial, parallel };

// Scratch buffers reused across sweeps of one solve.
struct SweepScratch {
    std::vector<double> marginal;  // h with the request count summed out, per reduced state
    std::vector<double> expected;  // E[h(s') | reduced state, action]
};

/*
One Bellman update of a per-sensor MDP with cost c + mu*a:
v_out[s] = min_a [c(s,a) + mu a + sum P(s'|s,a) h(s')], act_out[s] = argmin (ties to a=0).
*/
void sensor_sweep(Exec exec, const SensorModel& model, double mu, std::span<const double> h,
                  std::span<double> v_out, std::span<std::uint8_t> act_out, SweepScratch& scratch);

// One Bellman update over the joint space with the budget-constrained action set.
void joint_sweep(Exec exec, const JointModel& model, std::span<const double> h, std::span<double> v_out,
                 std::span<JointAction> act_out, SweepScratch& scratch);

// Row-compressed square matrix, used for transposed transition matrices.
struct CsrMatrix {
    std::size_t n = 0;
    std::vector<std::size_t> offsets;  // n + 1 entries
    std::vector<std::uint32_t> cols;
    std::vector<double> vals;
};

// out = M x
void spmv(Exec exec, const CsrMatrix& m, std::span<const double> x, std::span<double> out);

namespace serial {
void sensor_sweep(const SensorModel& model, double mu, std::span<const double> h, std::span<double> v_out,
                  std::span<std::uint8_t> act_out, SweepScratch& scratch);
void joint_sweep(const JointModel& model, std::span<const double> h, std::span<double> v_out,
                 std::span<JointAction> act_out, SweepScratch& scratch);
void spmv(const CsrMatrix& m, std::span<const double> x, std::span<double> out);
}  // namespace serial

namespace parallel {
void sensor_sweep(const SensorModel& model, double mu, std::span<const double> h, std::span<double> v_out,
                  std::span<std::uint8_t> act_out, SweepScratch& scratch);
void joint_sweep(const JointModel& model, std::span<const double> h, std::span<double> v_out,
                 std::span<JointAction> act_out, SweepScratch& scratch);
void spmv(const CsrMatrix& m, std::span<const double> x, std::span<double> out);
}  // namespace parallel

}  // namespace aoi::kernels
