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

// Pump-probe orchestration and signal extraction: window averages of
// sigma_z, the probe-oscillation amplitude h_z, damped-cosine frequency fits
// and Lorentzian sideband fits.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sledsim/bath.hpp"
#include "sledsim/propagators.hpp"
#include "sledsim/steady.hpp"

namespace sledsim {

enum class Solver { kLme, kLmeNoShift, kSled };

const char* solver_name(Solver s);

/// Trapezoidal mean of y over [t0, t1] on a sorted grid, with linear
/// interpolation at window edges that fall between samples. DomainError when
/// the window leaves the grid or is empty.
double window_average(const std::vector<double>& t, const std::vector<double>& y, double t0,
                      double t1);

struct ProbeWindow {
  double t0 = 0.0;
  double t1 = 0.0;
  /// Delta_p = 0: the window is the final 20 / Omega_d.
  bool fallback = false;
};

/// Averaging window [t_f - n_p t_p, t_f] with t_p = 2 pi / |omega_p - omega_d|.
/// A positive `max_window` caps n_p t_p (rounded down to whole periods, at
/// least one, or max_window itself when one period is longer).
ProbeWindow probe_window(double omega_d, double omega_p, int n_p, double t_f, double Omega_d,
                         double max_window = 0.0);

double time_average_sigma_z(const StateSeries& series, double omega_d, double omega_p, int n_p,
                            double t_f, double Omega_d);

/// Half peak-to-peak of y over samples with t in [t0, t1].
double oscillation_amplitude(const std::vector<double>& t, const std::vector<double>& y, double t0,
                             double t1);

/// Centered moving average over `width` samples (shrinking at the ends).
std::vector<double> moving_average(const std::vector<double>& y, std::size_t width);

struct DampedCosineFit {
  /// y = amplitude exp(-decay t) cos(omega t + phase) + offset
  double amplitude = 0.0;
  double decay = 0.0;
  double omega = 0.0;
  double phase = 0.0;
  double offset = 0.0;
  /// 1-sigma errors in the order above.
  std::array<double, 5> stderr{};
  double relative_residual = 0.0;
  int iterations = 0;
};

/// Uniformly sampled data spanning >= 8 periods. Throws FitFailure when the
/// fit does not converge or the relative residual exceeds 5%.
DampedCosineFit fit_damped_cosine(const std::vector<double>& t, const std::vector<double>& y);

struct LorentzianPairFit {
  /// y = baseline + sum_k height_k w_k^2 / ((x - center_k)^2 + w_k^2), k
  /// ordered by center. w_k is the half width at half maximum.
  std::array<double, 2> center{};
  std::array<double, 2> width{};
  std::array<double, 2> height{};
  double baseline = 0.0;
  std::array<double, 2> center_stderr{};
  std::array<double, 2> width_stderr{};
  /// |center_1 - center_0| <= width_0 + width_1.
  bool merged = false;
  double relative_residual = 0.0;
};

/// Throws FitFailure when no two separated extrema exist or the fit fails.
LorentzianPairFit fit_lorentzian_pair(const std::vector<double>& x, const std::vector<double>& y);

struct PumpProbeSetup {
  Solver solver = Solver::kLme;
  double omega_q = 0.0;
  BathSpec bath;
  double Omega_d = 0.0;
  /// Primary drive frequency; see drive_frequency_for.
  double omega_d = 0.0;
  double Omega_p = 0.0;
  double probe_phase = 1.5707963267948966;
  std::vector<double> omega_p_grid;
  int n_p = 20;
  /// 0 selects 20 drive periods 2 pi / Omega_d.
  double max_window = 0.0;
  /// Transient guard; 0 selects 10 / gamma.
  double guard = 0.0;
  /// 0 selects the solver's default step.
  double dt = 0.0;
  std::size_t n_traj = 500;
  std::uint64_t base_seed = 0;
  unsigned workers = 0;
};

struct ProbePoint {
  double omega_p = 0.0;
  double sigma_z_bar = 0.0;
  double sigma_z_stderr = 0.0;
  double h_z = 0.0;
  double t_final = 0.0;
  double window = 0.0;
  bool fallback = false;
};

struct ProbeScan {
  double omega_d = 0.0;
  int n_p = 0;
  std::vector<ProbePoint> points;
};

/// omega_q + Delta_s for the shifted LME, omega_q for the LME without shift;
/// for SLED the caller passes its fitted shift.
double drive_frequency_for(Solver solver, double omega_q, double delta_s);

/// Each grid point starts from the thermal state of the bare qubit and runs
/// for guard + window. Grid points are independent jobs; results keep grid
/// order.
ProbeScan pump_probe_scan(const PumpProbeSetup& setup);

enum class ShiftMethod { kLmeAnalytic, kSledFit };

struct ShiftSetup {
  ShiftMethod method = ShiftMethod::kLmeAnalytic;
  double omega_q = 0.0;
  double omega_c = 0.0;
  double hbar_beta = 0.0;
  std::vector<double> gammas;
  std::size_t n_traj = 1000;
  std::uint64_t base_seed = 0;
  unsigned workers = 0;
  double dt = 0.0;
  /// Free-decay horizon in units of 1/gamma (at least 16 qubit periods).
  double horizon_gamma = 3.0;
  std::size_t record_stride = 4;
};

struct ShiftPoint {
  double gamma = 0.0;
  double delta_s = 0.0;
  double stderr = 0.0;
  bool ok = false;
  std::string error;
};

struct ShiftScan {
  std::vector<ShiftPoint> points;
  /// Over the points with ok = true (needs two).
  LinearFit fit;
  bool fit_ok = false;
};

/// Free decay of sigma_x from the +1 eigenstate of sigma_x without drive;
/// the fitted frequency minus omega_q is the shift.
DampedCosineFit free_decay_fit(const StateSeries& series);

ShiftScan shift_scan(const ShiftSetup& setup);

}  // namespace sledsim
