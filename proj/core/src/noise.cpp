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

#include "sledsim/noise.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <mutex>
#include <random>
#include <sstream>

#include "fftw_lock.hpp"
#include "sledsim/errors.hpp"
#include "sledsim/parameters.hpp"

namespace sledsim {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Box-Muller on 53-bit uniforms; u1 in (0, 1] keeps the log finite.
class NormalSource {
 public:
  explicit NormalSource(std::uint64_t seed) : eng_(splitmix64(seed)) {}

  void pair(double& a, double& b) {
    const double u1 = static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;
    const double u2 = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    a = r * std::cos(kTwoPi * u2);
    b = r * std::sin(kTwoPi * u2);
  }

 private:
  std::mt19937_64 eng_;
};

long lag_offset(const NoiseGrid& grid, double lag) {
  const double k = lag / grid.dt;
  const double r = std::round(k);
  if (std::abs(k - r) > 1e-6 * std::max(1.0, std::abs(k))) {
    std::ostringstream msg;
    msg << "autocorrelation: lag " << lag << " is not a multiple of dt = " << grid.dt;
    throw ConfigError(msg.str());
  }
  return static_cast<long>(r);
}

}  // namespace

std::mutex& detail::fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

double NoiseGrid::nyquist() const { return kPi / dt; }

void NoiseGrid::validate() const {
  if (!(dt > 0.0)) throw ConfigError("noise grid: dt must be positive");
  if (n < 2 || !std::has_single_bit(n)) {
    std::ostringstream msg;
    msg << "noise grid: n = " << n << " is not a power of two >= 2";
    throw ConfigError(msg.str());
  }
}

NoiseGrid noise_grid_for(double dt, double horizon) {
  if (!(dt > 0.0) || !(horizon >= 0.0)) throw ConfigError("noise grid: need dt > 0 and horizon >= 0");
  const auto needed = static_cast<std::size_t>(std::ceil(horizon / dt)) + 2;
  return {dt, std::bit_ceil(std::max<std::size_t>(2 * needed, 2))};
}

double NoiseKernel::at(std::size_t m) const {
  const std::size_t n = grid.n;
  return g_tilde[m <= n / 2 ? m : n - m];
}

NoiseKernel build_kernel(const BathSpec& bath, const NoiseGrid& grid) {
  bath.validate();
  grid.validate();
  if (grid.nyquist() < 8.0 * bath.omega_c) {
    std::ostringstream msg;
    msg << "noise grid: Nyquist frequency " << grid.nyquist() << " below 8 omega_c = "
        << 8.0 * bath.omega_c;
    throw ConfigError(msg.str());
  }
  NoiseKernel k{grid, std::vector<double>(grid.n / 2 + 1, 0.0)};
  const double dw = kTwoPi / grid.duration();
  for (std::size_t m = 0; m <= grid.n / 2; ++m) {
    const double s = reduced_spectrum(bath, dw * static_cast<double>(m));
    if (s < -1e-15) {
      std::ostringstream msg;
      msg << "noise kernel: negative reduced spectrum " << s << " at bin " << m;
      throw NumericalError(msg.str());
    }
    k.g_tilde[m] = std::sqrt(std::max(s, 0.0));
  }
  return k;
}

NoiseKernel band_limited(const NoiseKernel& kernel, double omega_max) {
  NoiseKernel k = kernel;
  const double dw = kTwoPi / kernel.grid.duration();
  for (std::size_t m = 0; m < k.g_tilde.size(); ++m)
    if (dw * static_cast<double>(m) > omega_max) k.g_tilde[m] = 0.0;
  return k;
}

struct NoiseSynthesizer::Impl {
  NoiseGrid grid;
  fftw_complex* spectrum = nullptr;
  double* signal = nullptr;
  fftw_plan plan = nullptr;
};

NoiseSynthesizer::NoiseSynthesizer(const NoiseGrid& grid) : impl_(std::make_unique<Impl>()) {
  grid.validate();
  impl_->grid = grid;
  const std::size_t n = grid.n;
  impl_->spectrum = fftw_alloc_complex(n / 2 + 1);
  impl_->signal = fftw_alloc_real(n);
  std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
  // ESTIMATE planning does not time candidate algorithms, so the plan (and
  // with it the rounding pattern) does not depend on machine load.
  impl_->plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), impl_->spectrum, impl_->signal,
                                     FFTW_ESTIMATE);
  if (impl_->plan == nullptr) throw NumericalError("noise: FFTW planning failed");
}

NoiseSynthesizer::~NoiseSynthesizer() {
  std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
  if (impl_->plan) fftw_destroy_plan(impl_->plan);
  fftw_free(impl_->spectrum);
  fftw_free(impl_->signal);
}

void NoiseSynthesizer::synthesize(const NoiseKernel& kernel, std::uint64_t seed,
                                  NoiseTrajectory& out) {
  const NoiseGrid& grid = impl_->grid;
  if (kernel.grid.n != grid.n || kernel.grid.dt != grid.dt)
    throw ConfigError("noise: kernel grid differs from the synthesizer grid");
  const std::size_t n = grid.n;
  const std::size_t half = n / 2;
  const double bin = std::sqrt(1.0 / grid.duration());  // sqrt(dw / 2 pi)
  NormalSource normal(seed);
  fftw_complex* z = impl_->spectrum;

  // Draw order: DC and Nyquist (real), then bins 1..n/2-1 as (re, im).
  double a = 0.0;
  double b = 0.0;
  normal.pair(a, b);
  z[0][0] = kernel.g_tilde[0] * bin * a;
  z[0][1] = 0.0;
  z[half][0] = kernel.g_tilde[half] * bin * b;
  z[half][1] = 0.0;
  const double s = bin * std::sqrt(0.5);
  for (std::size_t m = 1; m < half; ++m) {
    normal.pair(a, b);
    z[m][0] = kernel.g_tilde[m] * s * a;
    z[m][1] = kernel.g_tilde[m] * s * b;
  }
  // Backward c2r: x_k = sum_m z_m exp(+2 pi i m k / n) with z_{n-m} = conj(z_m).
  fftw_execute(impl_->plan);

  out.grid = grid;
  out.seed = seed;
  out.samples.assign(impl_->signal, impl_->signal + grid.exposed());
}

NoiseTrajectory NoiseSynthesizer::synthesize(const NoiseKernel& kernel, std::uint64_t seed) {
  NoiseTrajectory t;
  synthesize(kernel, seed, t);
  return t;
}

NoiseTrajectory synthesize(const NoiseKernel& kernel, std::uint64_t seed) {
  NoiseSynthesizer synth(kernel.grid);
  return synth.synthesize(kernel, seed);
}

AutocorrelationAccumulator::AutocorrelationAccumulator(const NoiseGrid& grid,
                                                       const std::vector<double>& lags)
    : grid_(grid), lags_(lags) {
  grid.validate();
  const std::size_t exposed = grid.exposed();
  anchor_ = exposed / 4;
  for (double lag : lags) {
    if (std::abs(lag) > 0.5 * grid.duration()) {
      std::ostringstream msg;
      msg << "autocorrelation: lag " << lag << " exceeds half the record ("
          << 0.5 * grid.duration() << "); circular correlation would leak in";
      throw ConfigError(msg.str());
    }
    const long k = lag_offset(grid, lag);
    const long idx = static_cast<long>(anchor_) + k;
    if (idx < 0 || idx >= static_cast<long>(exposed)) {
      std::ostringstream msg;
      msg << "autocorrelation: lag " << lag << " leaves the exposed record from the anchor";
      throw ConfigError(msg.str());
    }
    offsets_.push_back(k);
  }
  sum_.assign(lags.size(), 0.0);
  sum_sq_.assign(lags.size(), 0.0);
}

void AutocorrelationAccumulator::add(const NoiseTrajectory& trajectory) {
  if (trajectory.grid.n != grid_.n || trajectory.grid.dt != grid_.dt)
    throw ConfigError("autocorrelation: trajectories must share one grid");
  const double x0 = trajectory.samples[anchor_];
  for (std::size_t i = 0; i < offsets_.size(); ++i) {
    const double p = x0 * trajectory.samples[static_cast<std::size_t>(
                              static_cast<long>(anchor_) + offsets_[i])];
    sum_[i] += p;
    sum_sq_[i] += p * p;
  }
  ++count_;
}

std::vector<LagEstimate> AutocorrelationAccumulator::result() const {
  if (count_ < 2) throw ConfigError("autocorrelation: need at least two trajectories");
  std::vector<LagEstimate> out;
  const double n = static_cast<double>(count_);
  for (std::size_t i = 0; i < lags_.size(); ++i) {
    const double mean = sum_[i] / n;
    const double var = std::max(0.0, (sum_sq_[i] - n * mean * mean) / (n - 1.0));
    out.push_back({lags_[i], mean, std::sqrt(var / n)});
  }
  return out;
}

std::vector<LagEstimate> estimate_autocorrelation(const std::vector<NoiseTrajectory>& trajectories,
                                                  const std::vector<double>& lags) {
  if (trajectories.size() < 2) throw ConfigError("autocorrelation: need at least two trajectories");
  AutocorrelationAccumulator acc(trajectories.front().grid, lags);
  for (const auto& t : trajectories) acc.add(t);
  return acc.result();
}

}  // namespace sledsim
