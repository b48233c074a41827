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

#include "sledsim/readout.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "sledsim/errors.hpp"

namespace sledsim {
namespace {

constexpr std::complex<double> kI{0.0, 1.0};

}  // namespace

void ResonatorSpec::validate() const {
  if (!(kappa > 0.0)) throw ConfigError("readout: kappa must be positive");
  if (!(Omega_m >= 0.0)) throw ConfigError("readout: Omega_m must be >= 0");
  if (!std::isfinite(chi) || !std::isfinite(omega_r) || !std::isfinite(omega_m))
    throw ConfigError("readout: non-finite resonator parameter");
}

FieldPoint quadratures_phase(std::complex<double> a) {
  FieldPoint p;
  p.a = a;
  p.I = a.real();
  p.Q = a.imag();
  p.A = std::hypot(p.I, p.Q);
  p.phi = std::atan2(p.Q, p.I);
  // atan2 returns -pi for (-x, -0.0); the branch is (-pi, pi].
  if (p.phi == -std::numbers::pi) p.phi = std::numbers::pi;
  return p;
}

std::complex<double> cavity_steady_field(const ResonatorSpec& res, double sigma_z_bar) {
  res.validate();
  const double d = res.Delta_rm() + res.chi * sigma_z_bar;
  return -kI * res.Omega_m / (res.kappa + 2.0 * kI * d);
}

FieldPoint cavity_field_closed_form(const ResonatorSpec& res, double sigma_z_bar,
                                    std::complex<double> a0, double t) {
  if (!(t >= 0.0)) throw DomainError("cavity_field_closed_form: t must be >= 0");
  const double d = res.Delta_rm() + res.chi * sigma_z_bar;
  const std::complex<double> k = kI * d + 0.5 * res.kappa;
  const std::complex<double> decay = std::exp(-k * t);
  const std::complex<double> a = a0 * decay + cavity_steady_field(res, sigma_z_bar) * (1.0 - decay);
  FieldPoint p = quadratures_phase(a);
  p.t = t;
  return p;
}

std::vector<FieldPoint> cavity_field_ode(const ResonatorSpec& res,
                                         const std::function<double(double)>& sigma_z_of_t,
                                         std::complex<double> a0, double dt, double t_final) {
  res.validate();
  if (!(dt > 0.0)) throw ConfigError("cavity_field_ode: dt must be positive");
  if (res.kappa * dt > 0.5) {
    std::ostringstream msg;
    msg << "cavity_field_ode: kappa dt = " << res.kappa * dt << " exceeds 0.5";
    throw ConfigError(msg.str());
  }
  auto rhs = [&](double t, std::complex<double> a) {
    const double d = res.Delta_rm() + res.chi * sigma_z_of_t(t);
    return -0.5 * kI * res.Omega_m - (kI * d + 0.5 * res.kappa) * a;
  };
  const auto n = static_cast<std::size_t>(std::ceil(t_final / dt - 1e-9));
  std::vector<FieldPoint> out;
  out.reserve(n + 1);
  std::complex<double> a = a0;
  FieldPoint p0 = quadratures_phase(a);
  out.push_back(p0);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * dt;
    const auto k1 = rhs(t, a);
    const auto k2 = rhs(t + 0.5 * dt, a + 0.5 * dt * k1);
    const auto k3 = rhs(t + 0.5 * dt, a + 0.5 * dt * k2);
    const auto k4 = rhs(t + dt, a + dt * k3);
    a += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    FieldPoint p = quadratures_phase(a);
    p.t = static_cast<double>(i + 1) * dt;
    out.push_back(p);
  }
  return out;
}

double transmitted_amplitude(const ResonatorSpec& res, double sigma_z_bar) {
  res.validate();
  if (res.Delta_rm() != 0.0)
    throw DomainError("transmitted_amplitude: needs Delta_rm = 0; use cavity_field_closed_form");
  const double u = 2.0 * res.chi * sigma_z_bar / res.kappa;
  return (res.Omega_m / res.kappa) / std::sqrt(1.0 + u * u);
}

}  // namespace sledsim
