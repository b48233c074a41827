// Copyright 2026 The sledsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Hot-path timings: matrix exponential, Magnus step, noise synthesis, and
// whole-trajectory steps per second for both solvers.

#include <numbers>

#include <benchmark/benchmark.h>

#include "sledsim/bath.hpp"
#include "sledsim/noise.hpp"
#include "sledsim/propagators.hpp"
#include "sledsim/qubit_algebra.hpp"

namespace {

using namespace sledsim;

// Unit system omega_q = 1, default ratios.
BathSpec unit_bath() { return BathSpec::from_gamma(0.01, 50.0, 5.0, 1.0); }

SledModel sled_model() { return {1.0, unit_bath(), DriveSpec::single(0.01, 1.0)}; }

void BM_MatrixExp(benchmark::State& state) {
  const Superop l = 0.01 * sled_liouvillian(sled_model(), 0.3, 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(matrix_exp(l));
}
BENCHMARK(BM_MatrixExp);

void BM_ExpmAction(benchmark::State& state) {
  const Superop l = 0.01 * sled_liouvillian(sled_model(), 0.3, 0.2);
  const LiouvilleVec v = vectorize(DensityMatrix::excited());
  for (auto _ : state) benchmark::DoNotOptimize(expm_action(l, v));
}
BENCHMARK(BM_ExpmAction);

void BM_Magnus2Step(benchmark::State& state) {
  const SledModel model = sled_model();
  const Generator gen = [&](double t) { return sled_liouvillian(model, t, 0.1); };
  LiouvilleVec v = vectorize(DensityMatrix::excited());
  double t = 0.0;
  for (auto _ : state) {
    v = magnus2_step(gen, t, 0.01, v);
    t += 0.01;
  }
  benchmark::DoNotOptimize(v);
}
BENCHMARK(BM_Magnus2Step);

void BM_NoiseSynthesis(benchmark::State& state) {
  const NoiseGrid grid{std::numbers::pi / 800.0, static_cast<std::size_t>(state.range(0))};
  const NoiseKernel kernel = build_kernel(unit_bath(), grid);
  NoiseSynthesizer synth(grid);
  NoiseTrajectory out;
  std::uint64_t seed = 0;
  for (auto _ : state) synth.synthesize(kernel, seed++, out);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.exposed()));
}
BENCHMARK(BM_NoiseSynthesis)->RangeMultiplier(8)->Range(1 << 12, 1 << 18);

void BM_LmeSteps(benchmark::State& state) {
  const LindbladModel model{1.0, rates(unit_bath()), DriveSpec::single(0.01, 1.0), true};
  const StepPlan plan{default_lme_step(1.0), 200.0, 1 << 30};
  for (auto _ : state) propagate_lme(model, DensityMatrix::excited(), plan, [](double, const DensityMatrix&) {});
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(plan.steps()));
}
BENCHMARK(BM_LmeSteps)->Unit(benchmark::kMillisecond);

void BM_SledTrajectorySteps(benchmark::State& state) {
  const SledModel model = sled_model();
  const StepPlan plan{default_sled_step(1.0, 50.0), 100.0, 1 << 30};
  const NoiseGrid grid = noise_grid_for(0.5 * plan.dt, plan.t_final);
  const NoiseTrajectory noise = synthesize(build_kernel(model.bath, grid), 3);
  for (auto _ : state)
    propagate_sled_trajectory(model, DensityMatrix::excited(), plan, noise, [](double, const DensityMatrix&) {});
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(plan.steps()));
}
BENCHMARK(BM_SledTrajectorySteps)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
