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

// Ohmic bath with a quartic Drude cutoff, J(w) = 2 eta w / (1 + w^2/wc^2)^2,
// and the quantities derived from it: occupations, Lindblad rates, the
// bath-induced energy shift and the white-noise-deducted spectrum that
// drives the stochastic solver.

#pragma once

namespace sledsim {

struct BathSpec {
  double eta = 0.0;
  double omega_c = 0.0;
  /// hbar * beta in seconds; hbar_beta * omega is the Boltzmann exponent.
  double hbar_beta = 0.0;
  double omega_q = 0.0;

  /// eta = gamma / (2 omega_q).
  static BathSpec from_gamma(double gamma, double omega_c, double hbar_beta, double omega_q);

  /// Throws ConfigError on eta < 0 or non-positive frequencies/temperature.
  void validate() const;
  /// omega_c < 10 omega_q: the rate mapping gamma = 2 eta omega_q assumes a
  /// far-away cutoff.
  bool cutoff_warning() const;
  double gamma() const { return 2.0 * eta * omega_q; }
};

struct BathRates {
  double gamma = 0.0;
  double gamma_beta = 0.0;
  double Gamma_down = 0.0;
  double Gamma_up = 0.0;
  double delta_s = 0.0;
};

double spectral_density(const BathSpec& spec, double omega);
/// 1 / (exp(hbar beta omega) - 1); DomainError for omega <= 0.
double bose_occupation(const BathSpec& spec, double omega);
/// J(omega) [n(omega) + 1], continued to omega <= 0 (S(0) = 2 eta / hbar beta).
double power_spectrum(const BathSpec& spec, double omega);

/// coth(y) - 1/y, series below |y| = 1e-3.
double coth_minus_inverse(double y);

/// Rates at omega_q. The shift is evaluated only when `with_shift` is set.
BathRates rates(const BathSpec& spec, bool with_shift = true);

/// Delta_s = (omega_q/pi) PV int_0^inf J(w) coth(hbar beta w/2) / (omega_q^2 - w^2) dw.
/// Throws NumericalError when the quadrature misses its tolerance.
double energy_shift(const BathSpec& spec);

/// J(omega) [coth(hbar beta omega/2) - 2/(hbar beta omega)] / 2; even in omega.
double reduced_spectrum(const BathSpec& spec, double omega);

/// L'_r(tau) = (1/pi) int_0^inf reduced_spectrum(w) cos(w tau) dw.
double real_correlation_reduced(const BathSpec& spec, double tau);

}  // namespace sledsim
