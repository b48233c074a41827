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

// Semiclassical dispersive readout: the resonator field is driven at omega_m
// and pulled by chi sigma_z, with sigma_z supplied by a qubit simulation.
//   da/dt = -i Omega_m / 2 - [i (Delta_rm + chi sigma_z) + kappa / 2] a

#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace sledsim {

struct ResonatorSpec {
  double omega_r = 0.0;
  double kappa = 0.0;
  double chi = 0.0;
  double Omega_m = 0.0;
  double omega_m = 0.0;

  double Delta_rm() const { return omega_r - omega_m; }
  /// ConfigError unless kappa > 0 and Omega_m >= 0.
  void validate() const;
};

struct FieldPoint {
  double t = 0.0;
  std::complex<double> a;
  double I = 0.0;
  double Q = 0.0;
  double A = 0.0;
  double phi = 0.0;  ///< in (-pi, pi]
};

FieldPoint quadratures_phase(std::complex<double> a);

/// Exact solution for constant sigma_z; t >= 0.
FieldPoint cavity_field_closed_form(const ResonatorSpec& res, double sigma_z_bar,
                                    std::complex<double> a0, double t);

/// Fixed point -i Omega_m / (kappa + 2 i (Delta_rm + chi sigma_z)).
std::complex<double> cavity_steady_field(const ResonatorSpec& res, double sigma_z_bar);

/// Classical RK4 integration on [0, t_final] with step dt. ConfigError when
/// kappa dt > 0.5.
std::vector<FieldPoint> cavity_field_ode(const ResonatorSpec& res,
                                         const std::function<double(double)>& sigma_z_of_t,
                                         std::complex<double> a0, double dt, double t_final);

/// (Omega_m / kappa) / sqrt(1 + (2 chi sigma_z / kappa)^2); requires
/// Delta_rm = 0 (DomainError otherwise).
double transmitted_amplitude(const ResonatorSpec& res, double sigma_z_bar);

}  // namespace sledsim
