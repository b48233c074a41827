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

#include <cmath>
#include <functional>
#include <random>

#include "sledsim/bath.hpp"
#include "sledsim/errors.hpp"
#include "sledsim/parameters.hpp"
#include "sledsim/spectroscopy.hpp"

namespace sledsim {
namespace {

std::vector<double> grid(double t0, double t1, std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n - 1);
  return t;
}

StateSeries z_series(const std::vector<double>& t, const std::function<double(double)>& z) {
  StateSeries s;
  s.times = t;
  for (double v : t) s.states.push_back(from_bloch({0.0, 0.0, z(v)}));
  return s;
}

TEST(WindowAverage, ConstantAndPeriodicSignals) {
  const auto t = grid(0.0, 50.0, 20001);
  std::vector<double> c(t.size(), 0.37);
  EXPECT_NEAR(window_average(t, c, 3.3, 41.7), 0.37, 1e-13);
  const double w = 0.9;
  std::vector<double> s;
  for (double v : t) s.push_back(0.2 + 0.5 * std::cos(w * v + 0.3));
  const double t1 = 49.0, t0 = t1 - 5.0 * kTwoPi / w;
  EXPECT_NEAR(window_average(t, s, t0, t1), 0.2, 1e-6 * 0.5);
  EXPECT_THROW(window_average(t, s, -1.0, 10.0), DomainError);
  EXPECT_THROW(window_average(t, s, 10.0, 10.0), DomainError);
}

TEST(ProbeWindow, PeriodsFallbackAndCap) {
  const auto w = probe_window(1.0, 1.1, 20, 1000.0, 0.01);
  EXPECT_FALSE(w.fallback);
  EXPECT_NEAR(w.t1 - w.t0, 20.0 * kTwoPi / 0.1, 1e-9);
  const auto f = probe_window(1.0, 1.0, 20, 5000.0, 0.01);
  EXPECT_TRUE(f.fallback);
  EXPECT_NEAR(f.t0, 5000.0 - 2000.0, 1e-9);
  // Cap keeps whole probe periods.
  const auto c = probe_window(1.0, 1.001, 20, 1e6, 0.01, 20000.0);
  const double tp = kTwoPi / 0.001;
  EXPECT_NEAR(c.t1 - c.t0, std::floor(20000.0 / tp) * tp, 1e-6);
  EXPECT_THROW(probe_window(1.0, 1.0, 0, 1.0, 0.01), DomainError);
}

TEST(TimeAverage, SeriesSigmaZ) {
  const double dp = 0.05;
  const auto t = grid(0.0, 3000.0, 60001);
  const auto s = z_series(t, [&](double v) { return -0.3 + 0.2 * std::sin(dp * v); });
  EXPECT_NEAR(time_average_sigma_z(s, 1.0, 1.0 + dp, 10, 3000.0, 0.01), -0.3, 1e-6 * 0.2);
  EXPECT_NEAR(time_average_sigma_z(s, 1.0, 1.0 - dp, 10, 3000.0, 0.01), -0.3, 1e-6 * 0.2);
  EXPECT_THROW(time_average_sigma_z(s, 1.0, 1.0 + dp, 200, 3000.0, 0.01), DomainError);
}

TEST(OscillationAmplitude, HalfPeakToPeak) {
  const auto t = grid(0.0, 100.0, 10001);
  std::vector<double> c(t.size(), 0.5), s, s2;
  for (double v : t) {
    s.push_back(0.1 + 0.25 * std::cos(0.7 * v));
    s2.push_back(-3.0 + 2.0 * 0.25 * std::cos(0.7 * v));
  }
  EXPECT_EQ(oscillation_amplitude(t, c, 0.0, 100.0), 0.0);
  const double a = oscillation_amplitude(t, s, 10.0, 30.0);
  EXPECT_NEAR(a, 0.25, 0.25 * (1.0 - std::cos(0.7 * 0.01 / 2)) + 1e-12);
  EXPECT_NEAR(oscillation_amplitude(t, s2, 10.0, 30.0), 2.0 * a, 1e-12);
  EXPECT_THROW(oscillation_amplitude(t, s, 200.0, 300.0), DomainError);
}

TEST(MovingAverage, PreservesConstantsAndRemovesCarrier) {
  std::vector<double> c(100, 2.0);
  for (double v : moving_average(c, 7)) EXPECT_DOUBLE_EQ(v, 2.0);
  EXPECT_EQ(moving_average(c, 1), c);
  std::vector<double> s;
  for (int i = 0; i < 640; ++i) s.push_back(0.3 + 0.01 * std::cos(kTwoPi * i / 64.0));
  const auto m = moving_average(s, 64);
  for (int i = 64; i < 576; ++i) EXPECT_NEAR(m[i], 0.3, 1e-12);
}

struct Synthetic {
  std::vector<double> t, y;
};

Synthetic damped(double amp, double lambda, double omega, double phase, double offset,
                 double horizon, std::size_t per_period) {
  Synthetic s;
  const double dt = kTwoPi / (omega * static_cast<double>(per_period));
  const auto n = static_cast<std::size_t>(horizon / dt);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * dt;
    s.t.push_back(t);
    s.y.push_back(amp * std::exp(-lambda * t) * std::cos(omega * t + phase) + offset);
  }
  return s;
}

TEST(DampedCosine, RandomRoundTrips) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double omega = 0.9 + 0.2 * u(rng);
    const double ratio = std::pow(10.0, -3.0 + std::log10(200.0) * u(rng));
    const double lambda = ratio * omega;
    const double amp = 0.5 + u(rng);
    const double phase = kPi * (2.0 * u(rng) - 1.0);
    const double offset = 0.2 * (u(rng) - 0.5);
    const double horizon = std::max(16.0 * kTwoPi / omega, 3.0 / lambda);
    const auto s = damped(amp, lambda, omega, phase, offset, horizon, 24);
    const auto f = fit_damped_cosine(s.t, s.y);
    // e^{-gamma t / 2} envelope: gamma = 2 lambda.
    EXPECT_NEAR(f.omega, omega, 1e-3 * 2.0 * lambda) << "draw " << i;
    EXPECT_NEAR(f.decay, lambda, 1e-3 * lambda) << "draw " << i;
    EXPECT_NEAR(f.amplitude, amp, 1e-3 * amp) << "draw " << i;
    EXPECT_NEAR(std::remainder(f.phase - phase, kTwoPi), 0.0, 1e-3) << "draw " << i;
    EXPECT_LT(f.relative_residual, 1e-6);
  }
}

TEST(DampedCosine, NoisyDataWithinReportedErrors) {
  std::mt19937_64 rng(32);
  std::normal_distribution<double> g(0.0, 0.005);
  auto s = damped(1.0, 0.01, 1.0, 0.4, 0.0, 300.0, 16);
  for (double& y : s.y) y += g(rng);
  const auto f = fit_damped_cosine(s.t, s.y);
  EXPECT_LT(std::abs(f.omega - 1.0), 4.0 * f.stderr[2]);
  EXPECT_LT(std::abs(f.decay - 0.01), 4.0 * f.stderr[1]);
  EXPECT_GT(f.stderr[2], 0.0);
}

TEST(DampedCosine, UndampedCosineHasZeroDecay) {
  const auto s = damped(0.8, 0.0, 2.0, -1.0, 0.1, 100.0, 20);
  const auto f = fit_damped_cosine(s.t, s.y);
  EXPECT_LE(f.decay, std::max(3.0 * f.stderr[1], 1e-10));
  EXPECT_NEAR(f.omega, 2.0, 1e-9);
}

TEST(DampedCosine, FailurePaths) {
  const auto short_run = damped(1.0, 0.01, 1.0, 0.0, 0.0, 5.0 * kTwoPi, 20);
  EXPECT_THROW(fit_damped_cosine(short_run.t, short_run.y), FitFailure);
  std::vector<double> t = grid(0.0, 100.0, 1000), c(1000, 1.0);
  EXPECT_THROW(fit_damped_cosine(t, c), FitFailure);
  std::mt19937_64 rng(33);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> noise;
  for (std::size_t i = 0; i < t.size(); ++i) noise.push_back(g(rng));
  EXPECT_THROW(fit_damped_cosine(t, noise), FitFailure);
  const auto growing = damped(1.0, -0.02, 1.0, 0.0, 0.0, 100.0, 20);
  EXPECT_THROW(fit_damped_cosine(growing.t, growing.y), FitFailure);
}

TEST(DampedCosine, LmeFreeDecayRecoversShift) {
  for (double g : {0.005, 0.02}) {
    const BathSpec bath = BathSpec::from_gamma(g, 50.0, 5.0, 1.0);
    LindbladModel m;
    m.omega_q = 1.0;
    m.rates = rates(bath);
    const auto s = propagate_lme(m, from_bloch({1.0, 0.0, 0.0}), {kTwoPi / 64, 3.0 / g, 2});
    const auto f = free_decay_fit(s);
    EXPECT_NEAR(f.omega - 1.0, m.rates.delta_s, 0.02 * std::abs(m.rates.delta_s)) << g;
    EXPECT_NEAR(f.decay, 0.5 * m.rates.gamma_beta, 1e-3 * m.rates.gamma_beta) << g;
  }
}

std::vector<double> lorentz_pair(const std::vector<double>& x, double c1, double w1, double h1,
                                 double c2, double w2, double h2, double base) {
  std::vector<double> y;
  for (double v : x)
    y.push_back(base + h1 * w1 * w1 / ((v - c1) * (v - c1) + w1 * w1) +
                h2 * w2 * w2 / ((v - c2) * (v - c2) + w2 * w2));
  return y;
}

TEST(LorentzianPair, SyntheticRoundTrip) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 30; ++i) {
    const double w1 = 0.001 + 0.001 * u(rng), w2 = 0.001 + 0.001 * u(rng);
    const double c1 = 0.99 + 0.002 * (u(rng) - 0.5), c2 = 1.01 + 0.002 * (u(rng) - 0.5);
    const double h1 = -(0.05 + 0.1 * u(rng)), h2 = -(0.05 + 0.1 * u(rng));
    const auto x = grid(0.97, 1.03, 121);
    const auto y = lorentz_pair(x, c1, w1, h1, c2, w2, h2, 0.3);
    const auto f = fit_lorentzian_pair(x, y);
    EXPECT_NEAR(f.center[0], c1, 0.1 * w1) << i;
    EXPECT_NEAR(f.center[1], c2, 0.1 * w2) << i;
    EXPECT_NEAR(f.width[0], w1, 0.05 * w1) << i;
    EXPECT_NEAR(f.baseline, 0.3, 1e-3) << i;
    EXPECT_FALSE(f.merged);
  }
}

TEST(LorentzianPair, SinglePeakIsFlagged) {
  const auto x = grid(0.97, 1.03, 121);
  const auto y = lorentz_pair(x, 1.0, 0.004, -0.2, 1.0, 0.004, 0.0, 0.3);
  bool flagged = false;
  try {
    flagged = fit_lorentzian_pair(x, y).merged;
  } catch (const FitFailure&) {
    flagged = true;
  }
  EXPECT_TRUE(flagged);
  EXPECT_THROW(fit_lorentzian_pair(grid(0, 1, 5), std::vector<double>(5, 0.0)), FitFailure);
}

PumpProbeSetup small_setup(double gamma_over_Od, double Omega_p) {
  PumpProbeSetup s;
  s.solver = Solver::kLme;
  s.omega_q = 1.0;
  s.Omega_d = 0.05;
  s.bath = BathSpec::from_gamma(gamma_over_Od * s.Omega_d, 50.0, 5.0, 1.0);
  s.omega_d = drive_frequency_for(Solver::kLme, 1.0, energy_shift(s.bath));
  s.Omega_p = Omega_p;
  s.workers = 1;
  return s;
}

TEST(PumpProbe, NoProbeGivesFlatResponse) {
  auto s = small_setup(1.0, 0.0);
  for (double d : {-0.06, -0.02, 0.03}) s.omega_p_grid.push_back(s.omega_d + d);
  const auto scan = pump_probe_scan(s);
  ASSERT_EQ(scan.points.size(), 3u);
  for (const auto& p : scan.points) EXPECT_NEAR(p.sigma_z_bar, scan.points[0].sigma_z_bar, 2e-4);
}

TEST(PumpProbe, SymmetricAboutTheDrive) {
  auto s = small_setup(0.5, 0.005);
  for (double d : {-0.01, 0.01}) s.omega_p_grid.push_back(s.omega_d + d);
  const auto scan = pump_probe_scan(s);
  const double a = scan.points[0].sigma_z_bar, b = scan.points[1].sigma_z_bar;
  EXPECT_NEAR(a, b, 0.02 * std::abs(a));
  EXPECT_GE(scan.points[0].t_final - scan.points[0].window, 10.0 / s.bath.gamma() - 1e-9);
}

TEST(ShiftScan, AnalyticRouteIsLinearAndNegative) {
  ShiftSetup s;
  s.omega_q = kDefaults.omega_q;
  s.omega_c = kDefaults.omega_c;
  s.hbar_beta = kDefaults.hbar_beta();
  for (double mhz : {2.5, 10.0, 50.0, 100.0, 250.0, 500.0}) s.gammas.push_back(kTwoPi * mhz * 1e6);
  const auto scan = shift_scan(s);
  ASSERT_TRUE(scan.fit_ok);
  EXPECT_GT(scan.fit.r_squared, 1.0 - 1e-12);
  EXPECT_LT(scan.fit.slope, 0.0);
  for (const auto& p : scan.points) EXPECT_LT(p.delta_s, 0.0);
  EXPECT_NEAR(-scan.fit.slope, 1.036, 5e-3);
}

}  // namespace
}  // namespace sledsim
