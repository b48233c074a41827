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

// Closed-form rotating-wave steady states of the Lindblad equation and the
// measures built on them.

#pragma once

#include <vector>

#include "sledsim/qubit_algebra.hpp"

namespace sledsim {

struct SteadyParams {
  double Omega_d = 0.0;
  double gamma = 0.0;
  double gamma_beta = 0.0;
  /// omega_q + Delta_s - omega_d
  double Delta_q = 0.0;

  /// DomainError unless Omega_d >= 0 and gamma_beta >= gamma > 0.
  void validate() const;
  SteadyParams at_detuning(double delta_q) const;
};

/// Rotating-frame steady Bloch vector of the driven, damped qubit.
BlochVector steady_bloch_rwa(const SteadyParams& p);

/// sigma(Delta_q) - sigma(0) for each Bloch component.
BlochVector delta_sigma(const SteadyParams& p);

/// measured_sigma_z - sigma_z(Delta_q = 0). Negative values cannot come from
/// the Lindblad equation.
double failure_measure(double measured_sigma_z, const SteadyParams& p_at_resonance);

/// Fidelity between the steady states driven at Delta_q = Delta_s and at
/// resonance, with gamma_beta set equal to gamma.
double lme_detuning_fidelity(double Delta_s, double Omega_d, double gamma);

/// Minimizer of lme_detuning_fidelity over gamma / Omega_d when
/// Delta_s = -alpha gamma. DomainError for alpha <= 0.
double critical_ratio(double alpha);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double slope_stderr = 0.0;
  double intercept_stderr = 0.0;
};

/// Ordinary least squares y = slope x + intercept (at least two points).
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace sledsim
