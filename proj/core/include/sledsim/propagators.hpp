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

// Time-dependent Liouvillians of the Lindblad master equation (LME) and of
// the stochastic Liouville equation with dissipation (SLED), second-order
// Magnus stepping, and trajectory/ensemble propagation.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "sledsim/bath.hpp"
#include "sledsim/noise.hpp"
#include "sledsim/qubit_algebra.hpp"

namespace sledsim {

struct Tone {
  double amplitude = 0.0;  ///< Rabi frequency, rad/s
  double omega = 0.0;      ///< rad/s
  double phase = 0.0;      ///< rad
};

/// Classical transverse drive f(t) = sum_k Omega_k cos(w_k t + phi_k) coupling
/// through sigma_x. In RWA mode the single tone keeps only its co-rotating
/// part, H_d = Omega (|0><1| e^{i theta} + |1><0| e^{-i theta}) / 2.
struct DriveSpec {
  std::vector<Tone> tones;
  bool rwa = false;

  static DriveSpec single(double amplitude, double omega, double phase = 0.0, bool rwa = false);
  /// ConfigError on negative amplitudes or an RWA drive with != 1 tone.
  void validate() const;
  double max_frequency() const;
};

/// f(t); DomainError for RWA drives.
double drive_value(const DriveSpec& drive, double t);
/// Lab-frame RWA drive Hamiltonian; DomainError unless drive.rwa.
Mat2 rwa_drive_hamiltonian(const DriveSpec& drive, double t);

struct LindbladModel {
  double omega_q = 0.0;
  BathRates rates;
  DriveSpec drive;
  /// Adds H_s = -Delta_s sigma_z / 2; false gives the LME without shift.
  bool include_shift = true;

  void validate() const;
};

struct SledModel {
  double omega_q = 0.0;
  BathSpec bath;
  DriveSpec drive;

  void validate() const;
};

struct StepPlan {
  double dt = 0.0;
  double t_final = 0.0;
  /// Store every record_stride-th state, starting with t = 0.
  std::size_t record_stride = 1;

  void validate() const;
  std::size_t steps() const;
};

/// min(2 pi / (64 omega_max), pi / (8 omega_c)): SLED steps also resolve the
/// noise bandwidth.
double default_sled_step(double omega_max, double omega_c);
/// 2 pi / (64 omega_max).
double default_lme_step(double omega_max);

Superop lme_liouvillian(const LindbladModel& model, double t);
/// Generator in the frame rotating at omega_d for a single RWA tone
/// (H = -Delta_q sigma_z / 2 + Omega (cos phi sigma_x - sin phi sigma_y) / 2,
/// Delta_q = omega_q [+ Delta_s] - omega_d). Time independent.
Superop lme_rotating_liouvillian(const LindbladModel& model, double omega_d);
/// -i[H_S + H_d(t) - xi sigma_x, .] - (eta/hbar beta)[sigma_x, [sigma_x, .]]
/// - i (eta omega_q / 2)[sigma_x, {sigma_y, .}].
Superop sled_liouvillian(const SledModel& model, double t, double xi);

using Generator = std::function<Superop(double)>;
/// exp(dt L(t + dt/2)) state.
LiouvilleVec magnus2_step(const Generator& l_of_t, double t, double dt, const LiouvilleVec& state);

struct StateSeries {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
};
using TrajectorySeries = StateSeries;

using StateObserver = std::function<void(double t, const DensityMatrix& rho)>;

/// Recorded states are checked for positivity (eigenvalues >= -1e-8); a
/// violation throws NumericalError suggesting a smaller step.
TrajectorySeries propagate_lme(const LindbladModel& model, const DensityMatrix& rho0,
                               const StepPlan& plan);
void propagate_lme(const LindbladModel& model, const DensityMatrix& rho0, const StepPlan& plan,
                   const StateObserver& observer);

/// The noise grid must have spacing plan.dt / 2 and cover t_final; the
/// midpoint of step k uses sample 2k + 1.
TrajectorySeries propagate_sled_trajectory(const SledModel& model, const DensityMatrix& rho0,
                                           const StepPlan& plan, const NoiseTrajectory& noise);
void propagate_sled_trajectory(const SledModel& model, const DensityMatrix& rho0,
                               const StepPlan& plan, const NoiseTrajectory& noise,
                               const StateObserver& observer);

struct EnsemblePlan {
  std::size_t n_traj = 10000;
  std::uint64_t base_seed = 0;
  unsigned workers = 0;  ///< 0 = hardware concurrency
  /// Optional [t0, t1]: each trajectory's mean z over recorded points in the
  /// window is collected so the window average gets a trajectory-level error.
  std::optional<std::pair<double, double>> z_window;

  void validate() const;
};

struct BlochCovariance {
  double var_x = 0.0;
  double var_y = 0.0;
  double var_z = 0.0;
  double cov_xy = 0.0;
};

struct EnsembleSeries : StateSeries {
  std::size_t n_traj = 0;
  /// Standard error of the lab-frame Bloch components of the mean state.
  std::vector<BlochVector> stderr;
  /// Trajectory-to-trajectory covariance of the lab-frame Bloch vector.
  std::vector<BlochCovariance> covariance;
  double window_z_mean = 0.0;
  double window_z_stderr = 0.0;
};

/// Trajectory i uses noise seed base_seed + i. Trajectories are summed in
/// blocks of fixed size and the blocks folded in index order, so the output
/// bits do not depend on the worker count.
EnsembleSeries propagate_sled_ensemble(const SledModel& model, const DensityMatrix& rho0,
                                       const StepPlan& plan, const EnsemblePlan& ensemble);

/// Standard errors of the rotating-frame Bloch components at record k.
BlochVector rotating_frame_stderr(const EnsembleSeries& series, std::size_t k, double omega_d);

/// Clips negative eigenvalues to 0 and renormalizes the trace. The clipped
/// magnitude (largest |negative eigenvalue|) is written to `clip`.
DensityMatrix clip_to_physical(const DensityMatrix& rho, double* clip = nullptr);

/// Ensemble means may carry statistical negativity beyond this before a
/// warning is logged.
inline constexpr double kEnsembleClipWarning = 1e-4;

struct WindowFidelity {
  double mean = 0.0;
  std::size_t points = 0;
  double max_clip = 0.0;
};

/// Mean fidelity over recorded points with t in [t0, t1]. Both series must
/// share their time grid. Throws DomainError on an empty window.
WindowFidelity window_fidelity(const StateSeries& a, const StateSeries& b, double t0, double t1);
double avg_fidelity_over_window(const StateSeries& a, const StateSeries& b, double t0, double t1);

}  // namespace sledsim
