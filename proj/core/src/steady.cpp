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

#include "sledsim/steady.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "sledsim/errors.hpp"

namespace sledsim {

void SteadyParams::validate() const {
  if (!(Omega_d >= 0.0) || !(gamma > 0.0) || !(gamma_beta >= gamma) || !std::isfinite(Delta_q)) {
    std::ostringstream msg;
    msg << "steady: need Omega_d >= 0 and gamma_beta >= gamma > 0 (Omega_d = " << Omega_d
        << ", gamma = " << gamma << ", gamma_beta = " << gamma_beta << ")";
    throw DomainError(msg.str());
  }
}

SteadyParams SteadyParams::at_detuning(double delta_q) const {
  SteadyParams p = *this;
  p.Delta_q = delta_q;
  return p;
}

BlochVector steady_bloch_rwa(const SteadyParams& p) {
  p.validate();
  const double od = p.Omega_d, g = p.gamma, gb = p.gamma_beta, d = p.Delta_q;
  const double den = 2.0 * od * od + gb * gb + 4.0 * d * d;
  return {-4.0 * g * od * d / (gb * den), -2.0 * g * od / den,
          g * (gb * gb + 4.0 * d * d) / (gb * den)};
}

BlochVector delta_sigma(const SteadyParams& p) {
  p.validate();
  if (p.Omega_d == 0.0) return {0.0, 0.0, 0.0};
  const double r = p.gamma / p.Omega_d;
  const double rb = p.gamma_beta / p.Omega_d;
  const double q = p.Delta_q / p.Omega_d;
  const double a = 2.0 + rb * rb + 4.0 * q * q;
  const double b = 2.0 + rb * rb;
  const double ratio = p.gamma / p.gamma_beta;
  return {-4.0 * ratio * q / a, 8.0 * r * q * q / (a * b), 8.0 * ratio * q * q / (a * b)};
}

double failure_measure(double measured_sigma_z, const SteadyParams& p_at_resonance) {
  return measured_sigma_z - steady_bloch_rwa(p_at_resonance.at_detuning(0.0)).z;
}

double lme_detuning_fidelity(double Delta_s, double Omega_d, double gamma) {
  if (!(Omega_d > 0.0) || !(gamma > 0.0))
    throw DomainError("lme_detuning_fidelity: Omega_d and gamma must be positive");
  const double base = 2.0 * Omega_d * Omega_d + gamma * gamma;
  return 1.0 - 4.0 * Delta_s * Delta_s * Omega_d * Omega_d /
                   ((base + 4.0 * Delta_s * Delta_s) * base);
}

double critical_ratio(double alpha) {
  if (!(alpha > 0.0)) throw DomainError("critical_ratio: alpha must be positive");
  return std::sqrt(2.0) / std::pow(1.0 + 4.0 * alpha * alpha, 0.25);
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw DomainError("linear_fit: need two or more (x, y) pairs of equal length");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw DomainError("linear_fit: x values are all equal");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    ss_res += r * r;
  }
  f.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  if (x.size() > 2) {
    const double s2 = ss_res / (n - 2.0);
    f.slope_stderr = std::sqrt(s2 / sxx);
    f.intercept_stderr = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
  }
  return f;
}

}  // namespace sledsim
