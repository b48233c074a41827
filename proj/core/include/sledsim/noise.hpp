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

// Gaussian noise with the autocorrelation L'_r(tau) of the bath, synthesized
// by filtering white noise in the frequency domain with sqrt(L~'_r).

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "sledsim/bath.hpp"

namespace sledsim {

struct NoiseGrid {
  double dt = 0.0;
  std::size_t n = 0;

  double duration() const { return dt * static_cast<double>(n); }
  double nyquist() const;
  /// Number of samples exposed to consumers (first half of the record).
  std::size_t exposed() const { return n / 2; }
  /// ConfigError unless dt > 0 and n >= 2 is a power of two.
  void validate() const;
};

/// Grid of spacing `dt` whose exposed half covers [0, horizon].
NoiseGrid noise_grid_for(double dt, double horizon);

struct NoiseKernel {
  NoiseGrid grid;
  /// G~(w_m) for m = 0..n/2; negative frequencies mirror these.
  std::vector<double> g_tilde;

  /// G~ at bin m in 0..n-1 (upper half maps to negative frequencies).
  double at(std::size_t m) const;
};

/// Requires grid.nyquist() >= 8 omega_c.
NoiseKernel build_kernel(const BathSpec& bath, const NoiseGrid& grid);
/// Same kernel with every bin above omega_max zeroed.
NoiseKernel band_limited(const NoiseKernel& kernel, double omega_max);

struct NoiseTrajectory {
  NoiseGrid grid;
  /// xi(k dt) for k < grid.exposed().
  std::vector<double> samples;
  std::uint64_t seed = 0;
};

/// Reusable synthesis workspace holding one FFTW plan. Not shareable between
/// threads; create one per worker.
class NoiseSynthesizer {
 public:
  explicit NoiseSynthesizer(const NoiseGrid& grid);
  ~NoiseSynthesizer();
  NoiseSynthesizer(const NoiseSynthesizer&) = delete;
  NoiseSynthesizer& operator=(const NoiseSynthesizer&) = delete;

  /// Deterministic in (kernel, seed). Reuses `out.samples` storage.
  void synthesize(const NoiseKernel& kernel, std::uint64_t seed, NoiseTrajectory& out);
  NoiseTrajectory synthesize(const NoiseKernel& kernel, std::uint64_t seed);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot convenience wrapper around NoiseSynthesizer.
NoiseTrajectory synthesize(const NoiseKernel& kernel, std::uint64_t seed);

struct LagEstimate {
  double tau = 0.0;
  double mean = 0.0;
  double stderr = 0.0;
};

/// Cross-trajectory estimate of E[xi(t_a) xi(t_a + tau)] at the anchor
/// t_a = exposed/4 samples. Lags must be multiples of dt (negative allowed).
std::vector<LagEstimate> estimate_autocorrelation(const std::vector<NoiseTrajectory>& trajectories,
                                                  const std::vector<double>& lags);

/// Streaming form of the estimator for ensembles too large to hold at once.
class AutocorrelationAccumulator {
 public:
  AutocorrelationAccumulator(const NoiseGrid& grid, const std::vector<double>& lags);
  void add(const NoiseTrajectory& trajectory);
  std::vector<LagEstimate> result() const;
  std::size_t count() const { return count_; }

 private:
  NoiseGrid grid_;
  std::vector<double> lags_;
  std::vector<long> offsets_;
  std::size_t anchor_ = 0;
  std::vector<double> sum_;
  std::vector<double> sum_sq_;
  std::size_t count_ = 0;
};

}  // namespace sledsim
