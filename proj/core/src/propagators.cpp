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

#include "sledsim/propagators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "sledsim/errors.hpp"
#include "sledsim/log.hpp"
#include "sledsim/parallel.hpp"
#include "sledsim/parameters.hpp"

namespace sledsim {
namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kLmePositivity = 1e-8;
// Trajectories per reduction block; fixed so the summation order is too.
constexpr std::size_t kBlockSize = 32;

Superop sigma_x_coupling() { return -kI * commutator_action(sigma_x()); }

// Generator pieces L(t) = base + c(t) * coupling with c(t) the coefficient of
// sigma_x in the Hamiltonian.
struct SplitGenerator {
  Superop base;
  Superop coupling;
};

SplitGenerator lme_parts(const LindbladModel& model) {
  const double w = model.omega_q + (model.include_shift ? model.rates.delta_s : 0.0);
  const Mat2 h = -0.5 * w * sigma_z();
  SplitGenerator g;
  g.base = commutator_superop(h) + model.rates.Gamma_down * dissipator_superop(0, 1) +
           model.rates.Gamma_up * dissipator_superop(1, 0);
  g.coupling = sigma_x_coupling();
  return g;
}

SplitGenerator sled_parts(const SledModel& model) {
  const double eta = model.bath.eta;
  const Superop cx = commutator_action(sigma_x());
  SplitGenerator g;
  g.base = commutator_superop(-0.5 * model.omega_q * sigma_z()) -
           (eta / model.bath.hbar_beta) * (cx * cx) -
           kI * (0.5 * eta * model.omega_q) * (cx * anticommutator_action(sigma_y()));
  g.coupling = -kI * cx;
  return g;
}

void check_recorded(const DensityMatrix& rho, double t, double tol, bool positivity) {
  const double tr = std::abs(rho.trace() - 1.0);
  const double herm = rho.hermiticity_error();
  if (!(tr <= 1e-9) || !(herm <= 1e-9)) {
    std::ostringstream msg;
    msg << "propagation at t = " << t << ": trace error " << tr << ", Hermiticity error " << herm;
    throw NumericalError(msg.str());
  }
  if (positivity && !rho.is_positive(tol)) {
    std::ostringstream msg;
    msg << "propagation at t = " << t << ": eigenvalue " << rho.eigenvalues()[0]
        << " below -" << tol << "; reduce the time step";
    throw NumericalError(msg.str());
  }
}

DensityMatrix as_state(const LiouvilleVec& v) { return DensityMatrix::unchecked(devectorize(v)); }

StateObserver collect(StateSeries& out) {
  return [&out](double t, const DensityMatrix& rho) {
    out.times.push_back(t);
    out.states.push_back(rho);
  };
}

void reserve_records(StateSeries& s, const StepPlan& plan) {
  const std::size_t n = plan.steps() / plan.record_stride + 1;
  s.times.reserve(n);
  s.states.reserve(n);
}

}  // namespace

DriveSpec DriveSpec::single(double amplitude, double omega, double phase, bool rwa) {
  DriveSpec d;
  d.tones.push_back({amplitude, omega, phase});
  d.rwa = rwa;
  return d;
}

void DriveSpec::validate() const {
  for (const Tone& t : tones) {
    if (!(t.amplitude >= 0.0) || !std::isfinite(t.amplitude))
      throw ConfigError("drive: tone amplitudes must be finite and >= 0");
    if (!std::isfinite(t.omega) || !std::isfinite(t.phase))
      throw ConfigError("drive: tone frequency and phase must be finite");
  }
  if (rwa && tones.size() != 1) throw ConfigError("drive: RWA mode takes exactly one tone");
}

double DriveSpec::max_frequency() const {
  double w = 0.0;
  for (const Tone& t : tones) w = std::max(w, std::abs(t.omega));
  return w;
}

double drive_value(const DriveSpec& drive, double t) {
  if (drive.rwa) throw DomainError("drive_value: RWA drives have no scalar lab field");
  double f = 0.0;
  for (const Tone& tone : drive.tones) f += tone.amplitude * std::cos(tone.omega * t + tone.phase);
  return f;
}

Mat2 rwa_drive_hamiltonian(const DriveSpec& drive, double t) {
  if (!drive.rwa || drive.tones.size() != 1)
    throw DomainError("rwa_drive_hamiltonian: needs a single-tone RWA drive");
  const Tone& tone = drive.tones.front();
  const double theta = tone.omega * t + tone.phase;
  return 0.5 * tone.amplitude * (std::cos(theta) * sigma_x() - std::sin(theta) * sigma_y());
}

void LindbladModel::validate() const {
  if (!(omega_q > 0.0)) throw ConfigError("lme: omega_q must be positive");
  if (!(rates.Gamma_down >= 0.0) || !(rates.Gamma_up >= 0.0))
    throw ConfigError("lme: rates must be non-negative");
  drive.validate();
}

void SledModel::validate() const {
  if (!(omega_q > 0.0)) throw ConfigError("sled: omega_q must be positive");
  bath.validate();
  drive.validate();
  if (drive.rwa) throw ConfigError("sled: the stochastic solver takes a lab-frame drive (rwa = false)");
}

void StepPlan::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("plan: dt must be positive");
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw ConfigError("plan: t_final must be >= 0");
  if (record_stride < 1) throw ConfigError("plan: record_stride must be >= 1");
}

std::size_t StepPlan::steps() const {
  return static_cast<std::size_t>(std::ceil(t_final / dt - 1e-9));
}

double default_sled_step(double omega_max, double omega_c) {
  return std::min(kTwoPi / (64.0 * omega_max), kPi / (8.0 * omega_c));
}

double default_lme_step(double omega_max) { return kTwoPi / (64.0 * omega_max); }

Superop lme_liouvillian(const LindbladModel& model, double t) {
  const SplitGenerator g = lme_parts(model);
  if (model.drive.rwa) return g.base + commutator_superop(rwa_drive_hamiltonian(model.drive, t));
  return g.base + drive_value(model.drive, t) * g.coupling;
}

Superop lme_rotating_liouvillian(const LindbladModel& model, double omega_d) {
  if (model.drive.tones.size() > 1)
    throw DomainError("lme_rotating_liouvillian: needs at most one tone");
  double amp = 0.0;
  double phase = 0.0;
  if (!model.drive.tones.empty()) {
    amp = model.drive.tones.front().amplitude;
    phase = model.drive.tones.front().phase;
  }
  const double delta_q = model.omega_q + (model.include_shift ? model.rates.delta_s : 0.0) - omega_d;
  const Mat2 h = -0.5 * delta_q * sigma_z() +
                 0.5 * amp * (std::cos(phase) * sigma_x() - std::sin(phase) * sigma_y());
  return commutator_superop(h) + model.rates.Gamma_down * dissipator_superop(0, 1) +
         model.rates.Gamma_up * dissipator_superop(1, 0);
}

Superop sled_liouvillian(const SledModel& model, double t, double xi) {
  const SplitGenerator g = sled_parts(model);
  return g.base + (drive_value(model.drive, t) - xi) * g.coupling;
}

LiouvilleVec magnus2_step(const Generator& l_of_t, double t, double dt, const LiouvilleVec& state) {
  return expm_action(dt * l_of_t(t + 0.5 * dt), state);
}

void propagate_lme(const LindbladModel& model, const DensityMatrix& rho0, const StepPlan& plan,
                   const StateObserver& observer) {
  model.validate();
  plan.validate();
  const SplitGenerator g = lme_parts(model);
  const std::size_t n = plan.steps();
  const double dt = plan.dt;
  LiouvilleVec v = vectorize(rho0);
  observer(0.0, rho0);
  const bool constant = model.drive.tones.empty();
  Superop step_map;
  if (constant) step_map = matrix_exp(dt * g.base);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * dt;
    const double tm = t + 0.5 * dt;
    if (constant) {
      v = step_map * v;
    } else if (model.drive.rwa) {
      v = expm_action(dt * (g.base + commutator_superop(rwa_drive_hamiltonian(model.drive, tm))), v);
    } else {
      v = expm_action(dt * (g.base + drive_value(model.drive, tm) * g.coupling), v);
    }
    if ((i + 1) % plan.record_stride == 0) {
      const double t1 = static_cast<double>(i + 1) * dt;
      const DensityMatrix rho = as_state(v);
      check_recorded(rho, t1, kLmePositivity, true);
      observer(t1, rho);
    }
  }
}

TrajectorySeries propagate_lme(const LindbladModel& model, const DensityMatrix& rho0,
                               const StepPlan& plan) {
  TrajectorySeries s;
  plan.validate();
  reserve_records(s, plan);
  propagate_lme(model, rho0, plan, collect(s));
  return s;
}

void propagate_sled_trajectory(const SledModel& model, const DensityMatrix& rho0,
                               const StepPlan& plan, const NoiseTrajectory& noise,
                               const StateObserver& observer) {
  model.validate();
  plan.validate();
  const double h = 0.5 * plan.dt;
  if (std::abs(noise.grid.dt - h) > 1e-12 * h) {
    std::ostringstream msg;
    msg << "sled: noise spacing " << noise.grid.dt << " must be half the step (" << h << ")";
    throw ConfigError(msg.str());
  }
  const std::size_t n = plan.steps();
  if (n > 0 && 2 * n - 1 >= noise.samples.size()) {
    std::ostringstream msg;
    msg << "sled: noise record (" << noise.samples.size() << " samples) shorter than the "
        << n << "-step horizon";
    throw ConfigError(msg.str());
  }
  const SplitGenerator g = sled_parts(model);
  const double dt = plan.dt;
  LiouvilleVec v = vectorize(rho0);
  observer(0.0, rho0);
  for (std::size_t i = 0; i < n; ++i) {
    const double tm = (static_cast<double>(i) + 0.5) * dt;
    const double c = drive_value(model.drive, tm) - noise.samples[2 * i + 1];
    v = expm_action(dt * (g.base + c * g.coupling), v);
    if ((i + 1) % plan.record_stride == 0) {
      const double t1 = static_cast<double>(i + 1) * dt;
      const DensityMatrix rho = as_state(v);
      check_recorded(rho, t1, 0.0, false);
      observer(t1, rho);
    }
  }
}

TrajectorySeries propagate_sled_trajectory(const SledModel& model, const DensityMatrix& rho0,
                                           const StepPlan& plan, const NoiseTrajectory& noise) {
  TrajectorySeries s;
  plan.validate();
  reserve_records(s, plan);
  propagate_sled_trajectory(model, rho0, plan, noise, collect(s));
  return s;
}

void EnsemblePlan::validate() const {
  if (n_traj < 1) throw ConfigError("ensemble: n_traj must be >= 1");
  if (z_window && !(z_window->first <= z_window->second))
    throw ConfigError("ensemble: z window must satisfy t0 <= t1");
}

namespace {

struct BlockSum {
  std::vector<Mat2> rho;
  // Per record: x, y, z, xx, yy, zz, xy.
  std::vector<std::array<double, 7>> moments;
  double window_sum = 0.0;
  double window_sum_sq = 0.0;

  explicit BlockSum(std::size_t records)
      : rho(records, Mat2::Zero()), moments(records, std::array<double, 7>{}) {}

  void add(const BlockSum& o) {
    for (std::size_t k = 0; k < rho.size(); ++k) {
      rho[k] += o.rho[k];
      for (int j = 0; j < 7; ++j) moments[k][j] += o.moments[k][j];
    }
    window_sum += o.window_sum;
    window_sum_sq += o.window_sum_sq;
  }
};

}  // namespace

EnsembleSeries propagate_sled_ensemble(const SledModel& model, const DensityMatrix& rho0,
                                       const StepPlan& plan, const EnsemblePlan& ensemble) {
  model.validate();
  plan.validate();
  ensemble.validate();
  const NoiseGrid grid = noise_grid_for(0.5 * plan.dt, plan.t_final);
  const NoiseKernel kernel = build_kernel(model.bath, grid);
  const std::size_t records = plan.steps() / plan.record_stride + 1;
  const std::size_t n_blocks = (ensemble.n_traj + kBlockSize - 1) / kBlockSize;
  const unsigned workers = resolve_workers(ensemble.workers);

  std::vector<std::unique_ptr<NoiseSynthesizer>> synths(workers);
  std::vector<double> times;
  std::mutex fold_mutex;
  std::map<std::size_t, BlockSum> pending;
  std::size_t cursor = 0;
  BlockSum total(records);

  auto run_block = [&](unsigned w, std::size_t b) {
    if (!synths[w]) synths[w] = std::make_unique<NoiseSynthesizer>(grid);
    BlockSum block(records);
    NoiseTrajectory noise;
    std::vector<double> local_times;
    const std::size_t first = b * kBlockSize;
    const std::size_t last = std::min(ensemble.n_traj, first + kBlockSize);
    for (std::size_t i = first; i < last; ++i) {
      synths[w]->synthesize(kernel, ensemble.base_seed + i, noise);
      std::size_t k = 0;
      double wsum = 0.0;
      std::size_t wcount = 0;
      local_times.clear();
      propagate_sled_trajectory(model, rho0, plan, noise, [&](double t, const DensityMatrix& rho) {
        const Mat2& m = rho.matrix();
        const double x = 2.0 * m(0, 1).real();
        const double y = -2.0 * m(0, 1).imag();
        const double z = (m(0, 0) - m(1, 1)).real();
        block.rho[k] += m;
        auto& mo = block.moments[k];
        mo[0] += x;
        mo[1] += y;
        mo[2] += z;
        mo[3] += x * x;
        mo[4] += y * y;
        mo[5] += z * z;
        mo[6] += x * y;
        if (ensemble.z_window && t >= ensemble.z_window->first && t <= ensemble.z_window->second) {
          wsum += z;
          ++wcount;
        }
        local_times.push_back(t);
        ++k;
      });
      if (ensemble.z_window) {
        if (wcount == 0) throw ConfigError("ensemble: z window contains no recorded point");
        const double zbar = wsum / static_cast<double>(wcount);
        block.window_sum += zbar;
        block.window_sum_sq += zbar * zbar;
      }
    }
    std::lock_guard<std::mutex> lock(fold_mutex);
    if (b == 0) times = local_times;
    pending.emplace(b, std::move(block));
    // Fold completed blocks strictly in index order.
    for (auto it = pending.find(cursor); it != pending.end(); it = pending.find(cursor)) {
      total.add(it->second);
      pending.erase(it);
      ++cursor;
    }
  };
  parallel_for(n_blocks, workers, run_block);

  EnsembleSeries out;
  out.n_traj = ensemble.n_traj;
  out.times = times;
  const double n = static_cast<double>(ensemble.n_traj);
  double worst_clip = 0.0;
  for (std::size_t k = 0; k < records; ++k) {
    const Mat2 raw = total.rho[k] / n;
    const Mat2 mean = 0.5 * (raw + raw.adjoint());
    const DensityMatrix rho = DensityMatrix::unchecked(mean);
    worst_clip = std::max(worst_clip, -rho.eigenvalues()[0]);
    out.states.push_back(rho);
    const auto& mo = total.moments[k];
    const double mx = mo[0] / n, my = mo[1] / n, mz = mo[2] / n;
    BlochCovariance c;
    if (ensemble.n_traj > 1) {
      const double f = n / (n - 1.0);
      c.var_x = std::max(0.0, f * (mo[3] / n - mx * mx));
      c.var_y = std::max(0.0, f * (mo[4] / n - my * my));
      c.var_z = std::max(0.0, f * (mo[5] / n - mz * mz));
      c.cov_xy = f * (mo[6] / n - mx * my);
    }
    out.covariance.push_back(c);
    out.stderr.push_back({std::sqrt(c.var_x / n), std::sqrt(c.var_y / n), std::sqrt(c.var_z / n)});
  }
  if (ensemble.z_window) {
    out.window_z_mean = total.window_sum / n;
    if (ensemble.n_traj > 1) {
      const double var = std::max(
          0.0, (total.window_sum_sq - n * out.window_z_mean * out.window_z_mean) / (n - 1.0));
      out.window_z_stderr = std::sqrt(var / n);
    }
  }
  if (worst_clip > kEnsembleClipWarning) {
    std::ostringstream msg;
    msg << "sled ensemble: mean state eigenvalue down to " << -worst_clip << " (" << ensemble.n_traj
        << " trajectories); fidelity consumers will clip it";
    log_warning(msg.str());
  }
  return out;
}

BlochVector rotating_frame_stderr(const EnsembleSeries& series, std::size_t k, double omega_d) {
  const BlochCovariance& c = series.covariance.at(k);
  const double th = omega_d * series.times.at(k);
  const double cs = std::cos(th), sn = std::sin(th);
  const double n = static_cast<double>(series.n_traj);
  const double vx = cs * cs * c.var_x + sn * sn * c.var_y - 2.0 * cs * sn * c.cov_xy;
  const double vy = sn * sn * c.var_x + cs * cs * c.var_y + 2.0 * cs * sn * c.cov_xy;
  return {std::sqrt(std::max(vx, 0.0) / n), std::sqrt(std::max(vy, 0.0) / n),
          std::sqrt(c.var_z / n)};
}

DensityMatrix clip_to_physical(const DensityMatrix& rho, double* clip) {
  const Mat2 h = 0.5 * (rho.matrix() + rho.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Mat2> es(h);
  Eigen::Vector2d ev = es.eigenvalues();
  const double worst = std::max(0.0, -ev.minCoeff());
  if (clip) *clip = worst;
  if (worst == 0.0) return DensityMatrix::unchecked(h / h.trace().real());
  for (int i = 0; i < 2; ++i) ev(i) = std::max(ev(i), 0.0);
  ev /= ev.sum();
  const Mat2 v = es.eigenvectors();
  const Mat2 out = v * ev.cast<Complex>().asDiagonal() * v.adjoint();
  return DensityMatrix::unchecked(out);
}

WindowFidelity window_fidelity(const StateSeries& a, const StateSeries& b, double t0, double t1) {
  if (a.times.size() != b.times.size())
    throw DomainError("window_fidelity: series have different time grids");
  WindowFidelity out;
  double sum = 0.0;
  for (std::size_t k = 0; k < a.times.size(); ++k) {
    const double t = a.times[k];
    if (std::abs(t - b.times[k]) > 1e-9 * std::max(std::abs(t), 1e-30))
      throw DomainError("window_fidelity: series have different time grids");
    if (t < t0 || t > t1) continue;
    double ca = 0.0, cb = 0.0;
    const DensityMatrix ra = clip_to_physical(a.states[k], &ca);
    const DensityMatrix rb = clip_to_physical(b.states[k], &cb);
    out.max_clip = std::max({out.max_clip, ca, cb});
    sum += fidelity(ra, rb);
    ++out.points;
  }
  if (out.points == 0) throw DomainError("window_fidelity: no recorded point inside the window");
  out.mean = sum / static_cast<double>(out.points);
  if (out.max_clip > kEnsembleClipWarning) {
    std::ostringstream msg;
    msg << "window fidelity: clipped eigenvalues up to " << out.max_clip;
    log_warning(msg.str());
  }
  return out;
}

double avg_fidelity_over_window(const StateSeries& a, const StateSeries& b, double t0, double t1) {
  return window_fidelity(a, b, t0, t1).mean;
}

}  // namespace sledsim
