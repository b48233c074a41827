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

#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include "sledsim/bath.hpp"
#include "sledsim/errors.hpp"
#include "sledsim/noise.hpp"
#include "sledsim/parameters.hpp"
#include "sledsim/propagators.hpp"

namespace sledsim {
namespace {

constexpr Complex kI{0.0, 1.0};

BathSpec unit_bath(double gamma_over_wq) {
  return BathSpec::from_gamma(gamma_over_wq, 50.0, 5.0, 1.0);
}

LindbladModel unit_lme(double gamma, bool shift, DriveSpec drive = {}) {
  LindbladModel m;
  m.omega_q = 1.0;
  m.rates = rates(unit_bath(gamma), shift);
  m.drive = std::move(drive);
  m.include_shift = shift;
  return m;
}

double max_abs_diff(const Superop& a, const Superop& b) { return (a - b).cwiseAbs().maxCoeff(); }

// Smooth deterministic stand-in for xi(t), sampled at spacing h.
NoiseTrajectory cosine_noise(double amp, double nu, double h, std::size_t n) {
  NoiseTrajectory t;
  t.grid = {h, n};
  for (std::size_t k = 0; k < n / 2; ++k) t.samples.push_back(amp * std::cos(nu * h * static_cast<double>(k)));
  return t;
}

TEST(Drive, ValueExamples) {
  EXPECT_DOUBLE_EQ(drive_value(DriveSpec::single(2.5, 3.0), 0.0), 2.5);
  EXPECT_NEAR(drive_value(DriveSpec::single(1.0, 3.0, kPi / 2), 0.0), 0.0, 1e-16);
  DriveSpec two;
  two.tones = {{kDefaults.Omega_d, kDefaults.omega_q, 0.0},
               {kDefaults.Omega_p, kDefaults.omega_q + 1e6, kPi / 2}};
  EXPECT_NEAR(drive_value(two, 0.0), kDefaults.Omega_d, 1e-9 * kDefaults.Omega_d);
  EXPECT_THROW(drive_value(DriveSpec::single(1.0, 1.0, 0.0, true), 0.0), DomainError);
}

TEST(Drive, Validation) {
  EXPECT_THROW(DriveSpec::single(-1.0, 1.0).validate(), ConfigError);
  DriveSpec two;
  two.rwa = true;
  two.tones = {{1.0, 1.0, 0.0}, {1.0, 2.0, 0.0}};
  EXPECT_THROW(two.validate(), ConfigError);
  SledModel m{1.0, unit_bath(0.01), DriveSpec::single(0.01, 1.0, 0.0, true)};
  EXPECT_THROW(m.validate(), ConfigError);
}

TEST(LmeLiouvillian, AnnihilatesTrace) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    DriveSpec d;
    d.tones = {{u(rng), 1.0 + u(rng), 6.0 * u(rng)}, {0.1 * u(rng), u(rng), 0.0}};
    const auto m = unit_lme(0.2 * u(rng), i % 2 == 0, d);
    EXPECT_LT(trace_annihilation_error(lme_liouvillian(m, 10.0 * u(rng))), 1e-12);
    auto r = m;
    r.drive = DriveSpec::single(u(rng), 1.0, u(rng), true);
    EXPECT_LT(trace_annihilation_error(lme_liouvillian(r, 10.0 * u(rng))), 1e-12);
  }
}

TEST(LmeLiouvillian, UndrivenFixedPointIsThermal) {
  for (double g : {1e-3, 5e-3, 0.1}) {
    for (bool shift : {true, false}) {
      const auto m = unit_lme(g, shift);
      const auto b = to_bloch(stationary_state(lme_liouvillian(m, 0.0)));
      EXPECT_NEAR(b.x, 0.0, 1e-12);
      EXPECT_NEAR(b.y, 0.0, 1e-12);
      EXPECT_NEAR(b.z, m.rates.gamma / m.rates.gamma_beta, 1e-12);
      EXPECT_NEAR(b.z, std::tanh(2.5), 1e-12);
    }
  }
}

TEST(LmeLiouvillian, ShiftTogglesOnlySigmaZCommutator) {
  const auto with = unit_lme(0.05, true);
  auto without = with;
  without.include_shift = false;
  const Superop diff = lme_liouvillian(with, 0.3) - lme_liouvillian(without, 0.3);
  const Superop expected = commutator_superop(-0.5 * with.rates.delta_s * sigma_z());
  EXPECT_LT(max_abs_diff(diff, expected), 1e-15);
  EXPECT_NE(with.rates.delta_s, 0.0);
}

TEST(LmeLiouvillian, NoRatesIsUnitary) {
  LindbladModel m;
  m.omega_q = 1.0;
  m.drive = DriveSpec::single(0.2, 1.1, 0.4);
  const Superop l = lme_liouvillian(m, 1.7);
  EXPECT_LT((l + l.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(LmeLiouvillian, RotatingFrameMatchesRwaSteadyState) {
  // Lab-frame RWA generator at the drive frequency vs its time-independent
  // rotating version: same fixed point after the frame change.
  const auto m = unit_lme(0.01, false, DriveSpec::single(0.01, 1.0, 0.0, true));
  const auto rho = stationary_state(lme_rotating_liouvillian(m, 1.0));
  const auto b = to_bloch(rho);
  const double gb = m.rates.gamma_beta / m.rates.gamma;
  EXPECT_NEAR(b.z, gb / (2.0 + gb * gb), 1e-10);
  EXPECT_NEAR(b.z, 0.3348, 5e-5);
}

TEST(SledLiouvillian, AnnihilatesTraceAndPreservesHermiticity) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    SledModel m{1.0, unit_bath(0.1 * std::abs(u(rng))), DriveSpec::single(std::abs(u(rng)), 1.0)};
    const Superop l = sled_liouvillian(m, 5.0 * u(rng), 30.0 * u(rng));
    EXPECT_LT(trace_annihilation_error(l), 1e-12);
    const Mat2 h = (Mat2() << 0.3, Complex(0.1, -0.2), Complex(0.1, 0.2), 0.7).finished();
    const Mat2 out = devectorize(l * vectorize(h));
    EXPECT_LT((out - out.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(SledLiouvillian, ZeroCouplingIsBareUnitaryLme) {
  SledModel s{1.0, unit_bath(0.0), DriveSpec::single(0.3, 0.9, 0.2)};
  LindbladModel l;
  l.omega_q = 1.0;
  l.drive = s.drive;
  l.include_shift = false;
  EXPECT_LT(max_abs_diff(sled_liouvillian(s, 2.1, 0.0), lme_liouvillian(l, 2.1)), 1e-15);
}

TEST(SledLiouvillian, AnticommutatorTermPullsTowardGround) {
  // [sx, {sy, I/2}] = 2i sz, so d rho = eta w_q sz and dz/dt = 2 eta w_q = gamma.
  const double g = 0.04;
  SledModel s{1.0, unit_bath(g), {}};
  const LiouvilleVec d = sled_liouvillian(s, 0.0, 0.0) * vectorize(DensityMatrix::maximally_mixed());
  const Mat2 dm = devectorize(d);
  EXPECT_NEAR((dm(0, 0) - dm(1, 1)).real(), g, 1e-15);
  EXPECT_NEAR(std::abs(dm(0, 1)), 0.0, 1e-15);
}

TEST(SledLiouvillian, DoubleCommutatorDephasesYAndZ) {
  const double eta = 0.02, hb = 5.0;
  const Superop cx = commutator_action(sigma_x());
  const Superop l = -(eta / hb) * (cx * cx);
  const auto rho = from_bloch({0.3, -0.4, 0.5});
  const Mat2 d = devectorize(l * vectorize(rho));
  const double rate = 4.0 * eta / hb;
  EXPECT_NEAR(2.0 * d(0, 1).real(), 0.0, 1e-15);
  EXPECT_NEAR(-2.0 * d(0, 1).imag(), -rate * -0.4, 1e-15);
  EXPECT_NEAR((d(0, 0) - d(1, 1)).real(), -rate * 0.5, 1e-15);
  // Same pieces inside the full generator.
  SledModel s{1.0, {eta, 50.0, hb, 1.0}, {}};
  const Superop full = sled_liouvillian(s, 0.0, 0.0);
  const Superop rest = commutator_superop(-0.5 * sigma_z()) -
                       kI * (0.5 * eta) * (cx * anticommutator_action(sigma_y()));
  EXPECT_LT(max_abs_diff(full - rest, l), 1e-15);
}

TEST(Magnus, ConstantGeneratorIsExactExponential) {
  const auto m = unit_lme(0.05, true);
  const Superop l = lme_liouvillian(m, 0.0);
  const LiouvilleVec v = vectorize(DensityMatrix::excited());
  const LiouvilleVec a = magnus2_step([&](double) { return l; }, 0.0, 0.7, v);
  const Superop scaled = 0.7 * l;
  const LiouvilleVec b = scaled.exp() * v;
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Magnus, FreeQubitPhaseAdvance) {
  LindbladModel m;
  m.omega_q = 1.0;
  const auto gen = [&](double t) { return lme_liouvillian(m, t); };
  LiouvilleVec v = vectorize(from_bloch({1.0, 0.0, 0.0}));
  const double dt = 0.01;
  for (int k = 1; k <= 100; ++k) {
    v = magnus2_step(gen, (k - 1) * dt, dt, v);
    const Mat2 r = devectorize(v);
    EXPECT_NEAR(std::arg(r(0, 1)), std::remainder(k * dt, kTwoPi), 1e-12);
    EXPECT_NEAR(std::abs(r(0, 1)), 0.5, 1e-13);
  }
}

double lme_final_error(double dt, double dt_ref) {
  const auto m = unit_lme(0.05, true, DriveSpec::single(0.3, 1.0));
  const DensityMatrix rho0 = DensityMatrix::excited();
  const auto a = propagate_lme(m, rho0, {dt, 8.0, 1});
  const auto r = propagate_lme(m, rho0, {dt_ref, 8.0, 1});
  return (a.states.back().matrix() - r.states.back().matrix()).norm();
}

TEST(Magnus, LmeSecondOrder) {
  const double dt = 0.08;
  const double e1 = lme_final_error(dt, dt / 16);
  const double e2 = lme_final_error(dt / 2, dt / 16);
  EXPECT_NEAR(e1 / e2, 4.0 * (1.0 - (1.0 / 16) * (1.0 / 16)) / (1.0 - 4.0 / 256), 0.8)
      << e1 << " " << e2;
}

double sled_final_error(double dt, double dt_ref) {
  SledModel s{1.0, unit_bath(0.05), DriveSpec::single(0.3, 1.0)};
  const double t_final = 8.0;
  auto run = [&](double h) {
    const auto steps = static_cast<std::size_t>(std::llround(t_final / h));
    const auto noise = cosine_noise(0.4, 2.3, 0.5 * h, std::bit_ceil(4 * steps + 4));
    return propagate_sled_trajectory(s, DensityMatrix::excited(), {h, t_final, 1}, noise);
  };
  return (run(dt).states.back().matrix() - run(dt_ref).states.back().matrix()).norm();
}

TEST(Magnus, SledSecondOrder) {
  const double dt = 0.08;
  const double e1 = sled_final_error(dt, dt / 16);
  const double e2 = sled_final_error(dt / 2, dt / 16);
  EXPECT_NEAR(e1 / e2, 4.0, 0.8) << e1 << " " << e2;
}

TEST(PropagateLme, ThermalizesFromExcitedState) {
  for (bool shift : {true, false}) {
    const auto m = unit_lme(0.05, shift);
    const auto s = propagate_lme(m, DensityMatrix::excited(), {0.1, 600.0, 1000});
    const auto b = to_bloch(s.states.back());
    EXPECT_NEAR(b.z, 0.986614298, 1e-9);
    EXPECT_NEAR(std::hypot(b.x, b.y), 0.0, 1e-12);
    for (const auto& r : s.states) {
      EXPECT_NEAR(std::abs(r.trace() - 1.0), 0.0, 1e-12);
      EXPECT_TRUE(r.is_positive(1e-12));
    }
  }
}

TEST(PropagateLme, RecordsAtStride) {
  const auto s = propagate_lme(unit_lme(0.05, true), DensityMatrix::excited(), {0.1, 1.0, 3});
  ASSERT_EQ(s.times.size(), 4u);
  EXPECT_DOUBLE_EQ(s.times[0], 0.0);
  EXPECT_NEAR(s.times[3], 0.9, 1e-15);
}

TEST(PropagateLme, RabiOscillationWithoutBath) {
  LindbladModel m;
  m.omega_q = 1.0;
  m.include_shift = false;
  const double omega = 0.05;
  m.drive = DriveSpec::single(omega, 1.0, 0.0, true);
  // Midpoint-Magnus phase error of the rotating drive: about 0.33 dt^2 at t = 200.
  const auto s = propagate_lme(m, DensityMatrix::excited(), {0.01, 200.0, 100});
  for (std::size_t k = 0; k < s.times.size(); ++k)
    EXPECT_NEAR(to_bloch(s.states[k]).z, -std::cos(omega * s.times[k]), 5e-5);
}

TEST(PropagateLme, LabFrameResonantSteadyState) {
  const double g = 0.01;
  const auto m = unit_lme(g, false, DriveSpec::single(g, 1.0));
  const double t_final = 25.0 / g;
  const auto s = propagate_lme(m, DensityMatrix::excited(), {kTwoPi / 64, t_final, 1});
  // Average over the last 20 carrier periods removes the counter-rotating ripple.
  double z = 0.0;
  const std::size_t n = 20 * 64;
  for (std::size_t k = s.states.size() - n; k < s.states.size(); ++k) z += to_bloch(s.states[k]).z;
  z /= static_cast<double>(n);
  EXPECT_NEAR(m.rates.gamma_beta / m.rates.gamma, 1.01357, 1e-5);
  EXPECT_NEAR(z, 0.3348, 1e-3);
}

TEST(PropagateSled, ZeroNoiseZeroCouplingMatchesUnitaryLme) {
  SledModel s{1.0, unit_bath(0.0), DriveSpec::single(0.2, 1.0)};
  LindbladModel l;
  l.omega_q = 1.0;
  l.include_shift = false;
  l.drive = s.drive;
  const StepPlan plan{0.05, 20.0, 4};
  NoiseTrajectory zero;
  zero.grid = {0.025, 2048};
  zero.samples.assign(1024, 0.0);
  const auto a = propagate_sled_trajectory(s, DensityMatrix::excited(), plan, zero);
  const auto b = propagate_lme(l, DensityMatrix::excited(), plan);
  ASSERT_EQ(a.states.size(), b.states.size());
  for (std::size_t k = 0; k < a.states.size(); ++k)
    EXPECT_LT((a.states[k].matrix() - b.states[k].matrix()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(PropagateSled, DeterministicAndTraceStable) {
  SledModel s{1.0, unit_bath(0.05), DriveSpec::single(0.05, 1.0)};
  const double dt = default_sled_step(1.0, 50.0);
  const StepPlan plan{dt, 1e5 * dt, 1000};
  const auto grid = noise_grid_for(0.5 * dt, plan.t_final);
  const auto noise = synthesize(build_kernel(s.bath, grid), 17);
  const auto a = propagate_sled_trajectory(s, DensityMatrix::excited(), plan, noise);
  const auto b = propagate_sled_trajectory(s, DensityMatrix::excited(), plan, noise);
  ASSERT_EQ(a.states.size(), 101u);
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    EXPECT_EQ(a.states[k].matrix(), b.states[k].matrix());
    EXPECT_LT(std::abs(a.states[k].trace() - 1.0), 1e-9);
    EXPECT_LT(a.states[k].hermiticity_error(), 1e-9);
  }
}

TEST(PropagateSled, RejectsMismatchedNoise) {
  SledModel s{1.0, unit_bath(0.05), {}};
  const StepPlan plan{0.01, 1.0, 1};
  const auto k = build_kernel(s.bath, {0.005, 1024});
  const auto ok = synthesize(k, 1);
  EXPECT_NO_THROW(propagate_sled_trajectory(s, DensityMatrix::excited(), plan, ok));
  const auto wrong = synthesize(build_kernel(s.bath, {0.0025, 1024}), 1);
  EXPECT_THROW(propagate_sled_trajectory(s, DensityMatrix::excited(), plan, wrong), ConfigError);
  const auto shrt = synthesize(build_kernel(s.bath, {0.005, 256}), 1);
  EXPECT_THROW(propagate_sled_trajectory(s, DensityMatrix::excited(), plan, shrt), ConfigError);
}

SledModel small_sled() { return {1.0, unit_bath(0.05), DriveSpec::single(0.05, 1.0)}; }
StepPlan small_plan() { return {default_sled_step(1.0, 50.0), 20.0, 16}; }

TEST(Ensemble, SingleTrajectoryEqualsDirectRun) {
  const auto s = small_sled();
  const auto plan = small_plan();
  EnsemblePlan e;
  e.n_traj = 1;
  e.base_seed = 77;
  e.workers = 1;
  const auto ens = propagate_sled_ensemble(s, DensityMatrix::excited(), plan, e);
  const auto noise = synthesize(build_kernel(s.bath, noise_grid_for(0.5 * plan.dt, plan.t_final)), 77);
  const auto one = propagate_sled_trajectory(s, DensityMatrix::excited(), plan, noise);
  ASSERT_EQ(ens.states.size(), one.states.size());
  for (std::size_t k = 0; k < one.states.size(); ++k) {
    const Mat2 h = 0.5 * (one.states[k].matrix() + one.states[k].matrix().adjoint());
    EXPECT_EQ(ens.states[k].matrix(), h) << (ens.states[k].matrix() - h).cwiseAbs().maxCoeff();
    EXPECT_EQ(ens.times[k], one.times[k]);
  }
}

TEST(Ensemble, IndependentOfWorkerCount) {
  const auto s = small_sled();
  EnsemblePlan e;
  e.n_traj = 70;
  e.base_seed = 3;
  e.z_window = std::make_pair(5.0, 20.0);
  e.workers = 1;
  const auto a = propagate_sled_ensemble(s, DensityMatrix::excited(), small_plan(), e);
  e.workers = 3;
  const auto b = propagate_sled_ensemble(s, DensityMatrix::excited(), small_plan(), e);
  ASSERT_EQ(a.states.size(), b.states.size());
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    EXPECT_EQ(a.states[k].matrix(), b.states[k].matrix());
    EXPECT_EQ(a.stderr[k].z, b.stderr[k].z);
  }
  EXPECT_EQ(a.window_z_mean, b.window_z_mean);
  EXPECT_EQ(a.window_z_stderr, b.window_z_stderr);
}

TEST(Ensemble, DisjointHalvesAgree) {
  const auto s = small_sled();
  EnsemblePlan e;
  e.n_traj = 200;
  e.base_seed = 0;
  const auto a = propagate_sled_ensemble(s, DensityMatrix::excited(), small_plan(), e);
  e.base_seed = 200;
  const auto b = propagate_sled_ensemble(s, DensityMatrix::excited(), small_plan(), e);
  int misses = 0;
  for (std::size_t k = 1; k < a.states.size(); ++k) {
    const auto ba = to_bloch(a.states[k]);
    const auto bb = to_bloch(b.states[k]);
    if (std::abs(ba.z - bb.z) > 3.0 * std::hypot(a.stderr[k].z, b.stderr[k].z)) ++misses;
    if (std::abs(ba.x - bb.x) > 3.0 * std::hypot(a.stderr[k].x, b.stderr[k].x)) ++misses;
    EXPECT_LT(std::abs(a.states[k].trace() - 1.0), 1e-9);
  }
  // Records are correlated in time; a few 3-sigma misses are allowed.
  EXPECT_LE(misses, static_cast<int>(a.states.size() / 20) + 1);
}

TEST(Ensemble, RotatingStderrReducesToLabAtZeroAngle) {
  EnsembleSeries s;
  s.n_traj = 4;
  s.times = {0.0, kPi / 2};
  BlochCovariance c{4.0, 1.0, 9.0, 0.5};
  s.covariance = {c, c};
  const auto r0 = rotating_frame_stderr(s, 0, 1.0);
  EXPECT_NEAR(r0.x, 1.0, 1e-15);
  EXPECT_NEAR(r0.y, 0.5, 1e-15);
  EXPECT_NEAR(r0.z, 1.5, 1e-15);
  const auto r1 = rotating_frame_stderr(s, 1, 1.0);
  EXPECT_NEAR(r1.x, 0.5, 1e-12);
  EXPECT_NEAR(r1.y, 1.0, 1e-12);
}

StateSeries bloch_series(const std::vector<double>& t, const std::vector<BlochVector>& v) {
  StateSeries s;
  s.times = t;
  for (const auto& b : v) s.states.push_back(from_bloch(b));
  return s;
}

TEST(WindowFidelity, Identities) {
  std::vector<double> t;
  std::vector<BlochVector> v, w;
  for (int k = 0; k <= 20; ++k) {
    t.push_back(0.1 * k);
    const double a = 0.5 * std::sin(0.3 * (k - 10) * (k - 10));
    v.push_back({a, 0.1, 0.2});
    w.push_back({0.0, 0.3, -0.2});
  }
  const auto s = bloch_series(t, v);
  EXPECT_NEAR(avg_fidelity_over_window(s, s, 0.0, 2.0), 1.0, 1e-12);
  // Signal symmetric about t = 1: reversing the state order changes nothing.
  auto r = s;
  std::reverse(r.states.begin(), r.states.end());
  const auto o = bloch_series(t, w);
  EXPECT_NEAR(avg_fidelity_over_window(s, o, 0.0, 2.0), avg_fidelity_over_window(r, o, 0.0, 2.0),
              1e-14);
  EXPECT_THROW(avg_fidelity_over_window(s, o, 5.0, 6.0), DomainError);
  auto shifted = o;
  shifted.times[3] += 0.01;
  EXPECT_THROW(avg_fidelity_over_window(s, shifted, 0.0, 2.0), DomainError);
}

TEST(WindowFidelity, ClipsSlightlyUnphysicalMeans) {
  StateSeries a, b;
  a.times = b.times = {0.0};
  a.states = {DensityMatrix::unchecked((Mat2() << 1.00005, 0.0, 0.0, -0.00005).finished())};
  b.states = {DensityMatrix::ground()};
  const auto f = window_fidelity(a, b, 0.0, 0.0);
  EXPECT_EQ(f.points, 1u);
  EXPECT_NEAR(f.max_clip, 5e-5, 1e-15);
  EXPECT_NEAR(f.mean, 1.0, 1e-12);
}

TEST(WindowFidelity, ShiftMattersMostNearCriticalRatio) {
  // RWA frame: Omega_d = 0.01 w_q, gamma = Omega_d vs 0.1 Omega_d.
  const double om = 0.01;
  auto window = [&](double g) {
    auto with = unit_lme(g, true, DriveSpec::single(om, 1.0, 0.0, true));
    auto without = unit_lme(g, false, DriveSpec::single(om, 1.0, 0.0, true));
    const StepPlan plan{0.5, 10.0 / g, 20};
    return avg_fidelity_over_window(propagate_lme(with, DensityMatrix::excited(), plan),
                                    propagate_lme(without, DensityMatrix::excited(), plan), 0.0,
                                    10.0 / g);
  };
  const double f1 = window(om);
  const double f01 = window(0.1 * om);
  EXPECT_LT(f1, f01);
  EXPECT_LT(f1, 0.99);
}

}  // namespace
}  // namespace sledsim
