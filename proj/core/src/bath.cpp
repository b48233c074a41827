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

#include "sledsim/bath.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sledsim/errors.hpp"
#include "sledsim/parameters.hpp"
#include "sledsim/quadrature.hpp"

namespace sledsim {
namespace {

// Quadratures stop at this multiple of the cutoff; the remaining tail falls
// off as w^-3.
constexpr double kUpperCutoffs = 50.0;

}  // namespace

BathSpec BathSpec::from_gamma(double gamma, double omega_c, double hbar_beta, double omega_q) {
  if (!(omega_q > 0.0)) throw ConfigError("bath: omega_q must be positive");
  BathSpec s{gamma / (2.0 * omega_q), omega_c, hbar_beta, omega_q};
  s.validate();
  return s;
}

void BathSpec::validate() const {
  std::ostringstream msg;
  if (!(eta >= 0.0) || !std::isfinite(eta)) msg << "eta must be finite and >= 0 (got " << eta << ")";
  else if (!(omega_c > 0.0)) msg << "omega_c must be positive (got " << omega_c << ")";
  else if (!(hbar_beta > 0.0)) msg << "hbar_beta must be positive (got " << hbar_beta << ")";
  else if (!(omega_q > 0.0)) msg << "omega_q must be positive (got " << omega_q << ")";
  else return;
  throw ConfigError("bath: " + msg.str());
}

bool BathSpec::cutoff_warning() const { return omega_c < 10.0 * omega_q; }

double spectral_density(const BathSpec& spec, double omega) {
  const double r = omega / spec.omega_c;
  const double d = 1.0 + r * r;
  return 2.0 * spec.eta * omega / (d * d);
}

double bose_occupation(const BathSpec& spec, double omega) {
  if (!(omega > 0.0)) throw DomainError("bose_occupation: omega must be positive");
  return 1.0 / std::expm1(spec.hbar_beta * omega);
}

double power_spectrum(const BathSpec& spec, double omega) {
  if (omega == 0.0) return 2.0 * spec.eta / spec.hbar_beta;
  // n + 1 = 1 / (1 - exp(-x)), valid for either sign of x.
  return spectral_density(spec, omega) / (-std::expm1(-spec.hbar_beta * omega));
}

double coth_minus_inverse(double y) {
  if (std::abs(y) < 1e-3) return y / 3.0 - y * y * y / 45.0;
  return 1.0 / std::tanh(y) - 1.0 / y;
}

BathRates rates(const BathSpec& spec, bool with_shift) {
  spec.validate();
  BathRates r;
  const double n = bose_occupation(spec, spec.omega_q);
  r.gamma = spec.gamma();
  r.Gamma_down = r.gamma * (n + 1.0);
  r.Gamma_up = r.gamma * n;
  r.gamma_beta = r.gamma * (2.0 * n + 1.0);
  if (with_shift) r.delta_s = energy_shift(spec);
  return r;
}

double energy_shift(const BathSpec& spec) {
  spec.validate();
  if (spec.eta == 0.0) return 0.0;
  const double wq = spec.omega_q;
  const double hb = spec.hbar_beta;

  // J(w) coth(hbar beta w / 2) / (wq + w); finite at w = 0.
  auto h = [&](double w) {
    double jc;
    if (w == 0.0) jc = 4.0 * spec.eta / hb;
    else jc = spectral_density(spec, w) / std::tanh(0.5 * hb * w);
    return jc / (wq + w);
  };
  // 1/(wq^2 - w^2) = 1/((wq - w)(wq + w)); around the pole subtract h(wq),
  // whose principal value over a symmetric window vanishes.
  const double hq = h(wq);
  auto outer = [&](double w) { return h(w) / (wq - w); };
  auto inner = [&](double w) {
    if (w == wq) return 0.0;
    return (h(w) - hq) / (wq - w);
  };

  const double half = 0.5 * wq;
  const double upper = kUpperCutoffs * spec.omega_c;
  // Tolerance 1e-10 gamma on Delta_s, spread over the five pieces.
  const double tol = 1e-10 * spec.gamma() * kPi / wq / 5.0;
  double sum = 0.0;
  sum += integrate(outer, 0.0, wq - half, tol, 0.0, "energy_shift");
  sum += integrate(inner, wq - half, wq, tol, 0.0, "energy_shift");
  sum += integrate(inner, wq, wq + half, tol, 0.0, "energy_shift");
  const double knee = std::max(spec.omega_c, 2.0 * (wq + half));
  if (upper > knee) {
    sum += integrate(outer, wq + half, knee, tol, 0.0, "energy_shift");
    sum += integrate(outer, knee, upper, tol, 0.0, "energy_shift");
  } else {
    sum += integrate(outer, wq + half, std::max(upper, wq + half), tol, 0.0, "energy_shift");
  }
  return wq / kPi * sum;
}

double reduced_spectrum(const BathSpec& spec, double omega) {
  const double w = std::abs(omega);
  if (w == 0.0) return 0.0;
  return 0.5 * spectral_density(spec, w) * coth_minus_inverse(0.5 * spec.hbar_beta * w);
}

double real_correlation_reduced(const BathSpec& spec, double tau) {
  spec.validate();
  if (spec.eta == 0.0) return 0.0;
  const double t = std::abs(tau);
  const double upper = kUpperCutoffs * spec.omega_c;
  auto f = [&](double w) { return reduced_spectrum(spec, w) * std::cos(w * t); };

  // Panels at most half an oscillation wide keep each Kronrod panel smooth.
  double width = spec.omega_c;
  if (t > 0.0) width = std::min(width, kPi / t);
  const int panels = static_cast<int>(std::ceil(upper / width));
  const double scale = spec.eta * spec.omega_c * spec.omega_c;
  const double abs_tol = 1e-13 * scale;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = p * width;
    const double b = std::min(upper, (p + 1) * width);
    sum += integrate(f, a, b, abs_tol, 1e-12, "real_correlation_reduced");
  }
  // Beyond the upper limit the bracket is 1 to within hbar beta w / 2 >> 1;
  // the J/2 tail integrates in closed form at tau = 0 and averages out by
  // oscillation otherwise.
  if (t == 0.0) {
    const double r = upper / spec.omega_c;
    sum += 0.5 * spec.eta * spec.omega_c * spec.omega_c / (1.0 + r * r);
  }
  return sum / kPi;
}

}  // namespace sledsim
