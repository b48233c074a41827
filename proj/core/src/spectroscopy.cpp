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

#include "sledsim/spectroscopy.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <mutex>
#include <numeric>
#include <sstream>

#include "fftw_lock.hpp"
#include "sledsim/errors.hpp"
#include "sledsim/fitting.hpp"
#include "sledsim/log.hpp"
#include "sledsim/parallel.hpp"
#include "sledsim/parameters.hpp"

namespace sledsim {
namespace {

constexpr double kMaxRelativeResidual = 0.05;

double wrap_phase(double phi) {
  phi = std::remainder(phi, kTwoPi);
  if (phi <= -kPi) phi += kTwoPi;
  return phi;
}

double uniform_step(const std::vector<double>& t) {
  if (t.size() < 2) throw FitFailure("fit: need at least two samples");
  const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  if (!(dt > 0.0)) throw FitFailure("fit: sample times must increase");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (std::abs(t[i] - t.front() - static_cast<double>(i) * dt) > 1e-6 * dt)
      throw FitFailure("fit: samples must be uniformly spaced");
  }
  return dt;
}

double spectral_power(const std::vector<double>& t, const std::vector<double>& y, double omega) {
  std::complex<double> s = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) s += y[i] * std::polar(1.0, -omega * t[i]);
  return std::norm(s);
}

// Angular frequency of the largest non-DC peak of the zero-padded spectrum.
double fft_peak(const std::vector<double>& y, double dt) {
  const std::size_t n = std::bit_ceil(4 * y.size());
  double* in = fftw_alloc_real(n);
  fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
  }
  std::fill(in, in + n, 0.0);
  std::copy(y.begin(), y.end(), in);
  fftw_execute(plan);
  std::size_t best = 1;
  double best_power = -1.0;
  for (std::size_t m = 1; m <= n / 2; ++m) {
    const double p = out[m][0] * out[m][0] + out[m][1] * out[m][1];
    if (p > best_power) {
      best_power = p;
      best = m;
    }
  }
  {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return kTwoPi * static_cast<double>(best) / (static_cast<double>(n) * dt);
}

double golden_max(const std::function<double(double)>& f, double a, double b, int iters) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double lorentzian(double x, double c, double w, double h) {
  const double u = x - c;
  return h * w * w / (u * u + w * w);
}

DensityMatrix thermal_state(double hbar_beta_omega_q) {
  return from_bloch({0.0, 0.0, std::tanh(0.5 * hbar_beta_omega_q)});
}

}  // namespace

const char* solver_name(Solver s) {
  switch (s) {
    case Solver::kLme:
      return "lme";
    case Solver::kLmeNoShift:
      return "lme-nes";
    case Solver::kSled:
      return "sled";
  }
  return "?";
}

double window_average(const std::vector<double>& t, const std::vector<double>& y, double t0,
                      double t1) {
  if (t.size() != y.size() || t.size() < 2) throw DomainError("window_average: bad series");
  if (!(t1 > t0)) throw DomainError("window_average: empty window");
  const double slack = 1e-9 * (t.back() - t.front());
  if (t0 < t.front() - slack || t1 > t.back() + slack) {
    std::ostringstream msg;
    msg << "window_average: window [" << t0 << ", " << t1 << "] leaves the series ["
        << t.front() << ", " << t.back() << "]";
    throw DomainError(msg.str());
  }
  t0 = std::max(t0, t.front());
  t1 = std::min(t1, t.back());
  auto interp = [&](std::size_t i, double x) {
    const double w = (x - t[i]) / (t[i + 1] - t[i]);
    return y[i] + w * (y[i + 1] - y[i]);
  };
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double a = std::max(t[i], t0);
    const double b = std::min(t[i + 1], t1);
    if (b <= a) continue;
    sum += 0.5 * (b - a) * (interp(i, a) + interp(i, b));
  }
  return sum / (t1 - t0);
}

ProbeWindow probe_window(double omega_d, double omega_p, int n_p, double t_f, double Omega_d,
                         double max_window) {
  if (n_p < 1) throw DomainError("probe_window: n_p must be >= 1");
  ProbeWindow w;
  w.t1 = t_f;
  const double dp = std::abs(omega_p - omega_d);
  if (dp == 0.0) {
    if (!(Omega_d > 0.0)) throw DomainError("probe_window: fallback window needs Omega_d > 0");
    w.fallback = true;
    w.t0 = t_f - 20.0 / Omega_d;
    return w;
  }
  const double tp = kTwoPi / dp;
  double len = n_p * tp;
  if (max_window > 0.0 && len > max_window) {
    const double periods = std::floor(max_window / tp);
    len = periods >= 1.0 ? periods * tp : max_window;
  }
  w.t0 = t_f - len;
  return w;
}

double time_average_sigma_z(const StateSeries& series, double omega_d, double omega_p, int n_p,
                            double t_f, double Omega_d) {
  const ProbeWindow w = probe_window(omega_d, omega_p, n_p, t_f, Omega_d);
  std::vector<double> z;
  z.reserve(series.states.size());
  for (const auto& rho : series.states) z.push_back((rho(0, 0) - rho(1, 1)).real());
  return window_average(series.times, z, w.t0, w.t1);
}

double oscillation_amplitude(const std::vector<double>& t, const std::vector<double>& y, double t0,
                             double t1) {
  if (t.size() != y.size()) throw DomainError("oscillation_amplitude: bad series");
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t0 || t[i] > t1) continue;
    lo = std::min(lo, y[i]);
    hi = std::max(hi, y[i]);
  }
  if (!(hi >= lo)) throw DomainError("oscillation_amplitude: empty window");
  return 0.5 * (hi - lo);
}

std::vector<double> moving_average(const std::vector<double>& y, std::size_t width) {
  if (width <= 1) return y;
  std::vector<double> prefix(y.size() + 1, 0.0);
  for (std::size_t i = 0; i < y.size(); ++i) prefix[i + 1] = prefix[i] + y[i];
  std::vector<double> out(y.size());
  const std::size_t left = width / 2;
  const std::size_t right = width - left;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const std::size_t a = i >= left ? i - left : 0;
    const std::size_t b = std::min(y.size(), i + right);
    out[i] = (prefix[b] - prefix[a]) / static_cast<double>(b - a);
  }
  return out;
}

DampedCosineFit fit_damped_cosine(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size()) throw FitFailure("fit_damped_cosine: size mismatch");
  const double dt = uniform_step(t);
  const std::size_t n = t.size();
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  std::vector<double> yc(n);
  for (std::size_t i = 0; i < n; ++i) yc[i] = y[i] - mean;
  const double spread = std::sqrt(std::inner_product(yc.begin(), yc.end(), yc.begin(), 0.0));
  if (!(spread > 0.0)) throw FitFailure("fit_damped_cosine: constant data");
  const double span = t.back() - t.front();

  // Frequency: FFT peak, then the maximum of the continuous spectrum nearby.
  const double w_fft = fft_peak(yc, dt);
  const double bin = kTwoPi / (4.0 * span);
  const double w0 = golden_max([&](double w) { return spectral_power(t, yc, w); },
                               std::max(w_fft - 2.0 * bin, 0.5 * w_fft), w_fft + 2.0 * bin, 60);
  const double periods = w0 * span / kTwoPi;
  if (periods < 8.0) {
    std::ostringstream msg;
    msg << "fit_damped_cosine: data cover " << periods << " periods (need 8)";
    throw FitFailure(msg.str());
  }

  // Decay: log of the demodulated envelope per period.
  const auto per = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(kTwoPi / (w0 * dt))));
  std::vector<double> bt, bl;
  double env_max = 0.0;
  std::vector<std::pair<double, double>> env;
  for (std::size_t s = 0; s + per <= n; s += per) {
    std::complex<double> c = 0.0;
    for (std::size_t i = s; i < s + per; ++i) c += yc[i] * std::polar(1.0, -w0 * t[i]);
    const double a = 2.0 * std::abs(c) / static_cast<double>(per);
    env.emplace_back(0.5 * (t[s] + t[s + per - 1]), a);
    env_max = std::max(env_max, a);
  }
  for (const auto& [tm, a] : env) {
    if (a > 0.05 * env_max) {
      bt.push_back(tm);
      bl.push_back(std::log(a));
    }
  }
  double lambda0 = 0.0;
  if (bt.size() >= 2) lambda0 = std::max(0.0, -linear_fit(bt, bl).slope);

  // Amplitude, phase and offset by linear least squares at fixed (w0, lambda0).
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double e = std::exp(-lambda0 * t[i]);
    design(i, 0) = e * std::cos(w0 * t[i]);
    design(i, 1) = e * std::sin(w0 * t[i]);
    design(i, 2) = 1.0;
    rhs(i) = y[i];
  }
  const Eigen::Vector3d lin = design.colPivHouseholderQr().solve(rhs);
  const double a0 = std::hypot(lin(0), lin(1));
  const double phi0 = std::atan2(-lin(1), lin(0));

  auto residual = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(n);
    for (std::size_t i = 0; i < n; ++i)
      r(i) = p(0) * std::exp(-p(1) * t[i]) * std::cos(p(2) * t[i] + p(3)) + p(4) - y[i];
    return r;
  };
  Eigen::VectorXd p0(5), scale(5);
  p0 << a0, lambda0, w0, phi0, lin(2);
  const double y_rms = spread / std::sqrt(static_cast<double>(n));
  scale << std::max(a0, y_rms), std::max(lambda0, 1.0 / span), w0, 1.0, std::max(std::abs(lin(2)), y_rms);
  const LmResult lm = levenberg_marquardt(residual, p0, scale);
  if (!lm.converged || !lm.params.allFinite()) {
    throw FitFailure("fit_damped_cosine: " + lm.message);
  }

  DampedCosineFit f;
  f.amplitude = lm.params(0);
  f.decay = lm.params(1);
  f.omega = lm.params(2);
  f.phase = lm.params(3);
  f.offset = lm.params(4);
  for (int k = 0; k < 5; ++k) f.stderr[k] = lm.stderr(k);
  f.iterations = lm.iterations;
  f.relative_residual = lm.residual_norm / spread;
  if (f.amplitude < 0.0) {
    f.amplitude = -f.amplitude;
    f.phase += kPi;
  }
  f.phase = wrap_phase(f.phase);
  if (f.decay < 0.0) {
    if (f.decay < -3.0 * f.stderr[1]) {
      std::ostringstream msg;
      msg << "fit_damped_cosine: growing envelope (decay " << f.decay << " +- " << f.stderr[1] << ")";
      throw FitFailure(msg.str());
    }
    f.decay = 0.0;
  }
  if (!(f.relative_residual < kMaxRelativeResidual)) {
    std::ostringstream msg;
    msg << "fit_damped_cosine: relative residual " << f.relative_residual << " exceeds "
        << kMaxRelativeResidual << " (omega " << f.omega << ", decay " << f.decay << ")";
    throw FitFailure(msg.str());
  }
  return f;
}

LorentzianPairFit fit_lorentzian_pair(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 8)
    throw FitFailure("fit_lorentzian_pair: need at least 8 points");
  const std::size_t n = x.size();
  const double base = median(y);
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = y[i] - base;
  const double spacing = (x.back() - x.front()) / static_cast<double>(n - 1);

  auto half_width = [&](std::size_t i) {
    const double target = 0.5 * std::abs(d[i]);
    std::size_t lo = i, hi = i;
    while (lo > 0 && std::abs(d[lo]) > target && d[lo] * d[i] > 0.0) --lo;
    while (hi + 1 < n && std::abs(d[hi]) > target && d[hi] * d[i] > 0.0) ++hi;
    return std::max(0.5 * (x[hi] - x[lo]), spacing);
  };
  auto argmax_abs = [&](const std::function<bool(std::size_t)>& allowed) {
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i)
      if (allowed(i) && (best == n || std::abs(d[i]) > std::abs(d[best]))) best = i;
    return best;
  };
  const std::size_t i1 = argmax_abs([](std::size_t) { return true; });
  const double w1 = half_width(i1);
  const std::size_t i2 =
      argmax_abs([&](std::size_t i) { return std::abs(x[i] - x[i1]) > 3.0 * w1; });
  if (i2 == n || std::abs(d[i2]) < 0.05 * std::abs(d[i1]))
    throw FitFailure("fit_lorentzian_pair: no second resolvable extremum");
  const double w2 = half_width(i2);

  auto model = [&](const Eigen::VectorXd& p, double xv) {
    return p(6) + lorentzian(xv, p(0), p(1), p(2)) + lorentzian(xv, p(3), p(4), p(5));
  };
  auto residual = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(n);
    for (std::size_t i = 0; i < n; ++i) r(i) = model(p, x[i]) - y[i];
    return r;
  };
  Eigen::VectorXd p0(7), scale(7);
  p0 << x[i1], w1, d[i1], x[i2], w2, d[i2], base;
  const double amp = std::abs(d[i1]);
  const double xs = std::max(std::abs(x[i1]), std::abs(x[i2]));
  scale << xs, std::max(w1, spacing), amp, xs, std::max(w2, spacing), amp,
      std::max(std::abs(base), amp);
  const LmResult lm = levenberg_marquardt(residual, p0, scale);
  if (!lm.converged || !lm.params.allFinite() || !lm.stderr.allFinite())
    throw FitFailure("fit_lorentzian_pair: " + (lm.converged ? std::string("singular fit") : lm.message));

  LorentzianPairFit f;
  std::array<int, 2> order{0, 1};
  if (lm.params(3) < lm.params(0)) order = {1, 0};
  for (int k = 0; k < 2; ++k) {
    const int j = 3 * order[k];
    f.center[k] = lm.params(j);
    f.width[k] = std::abs(lm.params(j + 1));
    f.height[k] = lm.params(j + 2);
    f.center_stderr[k] = lm.stderr(j);
    f.width_stderr[k] = lm.stderr(j + 1);
  }
  f.baseline = lm.params(6);
  double spread = 0.0;
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  for (double v : y) spread += (v - mean) * (v - mean);
  f.relative_residual = lm.residual_norm / std::sqrt(spread);
  for (int k = 0; k < 2; ++k) {
    if (!(f.width[k] > 0.0) || f.center[k] < x.front() || f.center[k] > x.back())
      throw FitFailure("fit_lorentzian_pair: fitted peak outside the scanned range");
  }
  f.merged = std::abs(f.center[1] - f.center[0]) <= f.width[0] + f.width[1];
  return f;
}

double drive_frequency_for(Solver solver, double omega_q, double delta_s) {
  return solver == Solver::kLmeNoShift ? omega_q : omega_q + delta_s;
}

ProbeScan pump_probe_scan(const PumpProbeSetup& s) {
  s.bath.validate();
  if (!(s.Omega_d > 0.0)) throw ConfigError("pump-probe: Omega_d must be positive");
  if (!(s.omega_d > 0.0)) throw ConfigError("pump-probe: omega_d must be positive");
  if (s.omega_p_grid.empty()) throw ConfigError("pump-probe: empty probe grid");
  if (s.n_p < 1) throw ConfigError("pump-probe: n_p must be >= 1");
  if (s.Omega_p > 0.2 * s.Omega_d) {
    std::ostringstream msg;
    msg << "pump-probe: Omega_p = " << s.Omega_p / s.Omega_d << " Omega_d is not a weak probe";
    log_warning(msg.str());
  }
  const double gamma = s.bath.gamma();
  const double guard = s.guard > 0.0 ? s.guard : (gamma > 0.0 ? 10.0 / gamma : 0.0);
  const double max_window = s.max_window > 0.0 ? s.max_window : 20.0 * kTwoPi / s.Omega_d;
  double w_max = std::max(s.omega_q, s.omega_d);
  for (double wp : s.omega_p_grid) w_max = std::max(w_max, wp);
  const bool sled = s.solver == Solver::kSled;
  const double dt = s.dt > 0.0 ? s.dt
                    : sled      ? default_sled_step(w_max, s.bath.omega_c)
                                : default_lme_step(w_max);
  const DensityMatrix rho0 = thermal_state(s.bath.hbar_beta * s.omega_q);

  BathRates rates;
  if (!sled) rates = sledsim::rates(s.bath, s.solver == Solver::kLme);

  ProbeScan scan;
  scan.omega_d = s.omega_d;
  scan.n_p = s.n_p;
  scan.points.resize(s.omega_p_grid.size());

  const unsigned workers = sled ? 1u : resolve_workers(s.workers);
  auto run_point = [&](unsigned, std::size_t j) {
    const double wp = s.omega_p_grid[j];
    const ProbeWindow probe = probe_window(s.omega_d, wp, s.n_p, 0.0, s.Omega_d, max_window);
    const double len = probe.t1 - probe.t0;
    ProbePoint pt;
    pt.omega_p = wp;
    pt.window = len;
    pt.fallback = probe.fallback;
    pt.t_final = guard + len;
    const double t0 = pt.t_final - len;

    DriveSpec drive;
    drive.tones.push_back({s.Omega_d, s.omega_d, 0.0});
    drive.tones.push_back({s.Omega_p, wp, s.probe_phase});
    StepPlan plan{dt, pt.t_final, 1};
    // sigma_z carries a small ripple at the carrier from counter-rotating
    // terms; h_z is read after a moving average over one carrier period.
    std::size_t carrier = static_cast<std::size_t>(std::llround(kTwoPi / (s.omega_d * dt)));

    std::vector<double> ts, zs;
    if (!sled) {
      LindbladModel model{s.omega_q, rates, drive, s.solver == Solver::kLme};
      const double keep_from = t0 - static_cast<double>(carrier) * dt;
      propagate_lme(model, rho0, plan, [&](double t, const DensityMatrix& rho) {
        if (t < keep_from) return;
        ts.push_back(t);
        zs.push_back((rho(0, 0) - rho(1, 1)).real());
      });
    } else {
      plan.record_stride = std::max<std::size_t>(1, carrier / 16);
      carrier = std::max<std::size_t>(1, carrier / plan.record_stride);
      SledModel model{s.omega_q, s.bath, drive};
      EnsemblePlan ens;
      ens.n_traj = s.n_traj;
      ens.base_seed = s.base_seed;
      ens.workers = s.workers;
      ens.z_window = std::make_pair(t0, pt.t_final);
      const EnsembleSeries es = propagate_sled_ensemble(model, rho0, plan, ens);
      for (std::size_t k = 0; k < es.times.size(); ++k) {
        ts.push_back(es.times[k]);
        zs.push_back((es.states[k](0, 0) - es.states[k](1, 1)).real());
      }
      pt.sigma_z_stderr = es.window_z_stderr;
    }
    pt.sigma_z_bar = window_average(ts, zs, t0, pt.t_final);
    pt.h_z = oscillation_amplitude(ts, moving_average(zs, carrier), t0, pt.t_final);
    scan.points[j] = pt;
  };
  parallel_for(s.omega_p_grid.size(), workers, run_point);
  return scan;
}

DampedCosineFit free_decay_fit(const StateSeries& series) {
  std::vector<double> x;
  x.reserve(series.states.size());
  for (const auto& rho : series.states) x.push_back(2.0 * rho(0, 1).real());
  return fit_damped_cosine(series.times, x);
}

ShiftScan shift_scan(const ShiftSetup& s) {
  ShiftScan out;
  for (double gamma : s.gammas) {
    ShiftPoint pt;
    pt.gamma = gamma;
    try {
      const BathSpec bath = BathSpec::from_gamma(gamma, s.omega_c, s.hbar_beta, s.omega_q);
      if (s.method == ShiftMethod::kLmeAnalytic) {
        pt.delta_s = energy_shift(bath);
      } else {
        const double dt = s.dt > 0.0 ? s.dt : default_sled_step(s.omega_q, s.omega_c);
        const double horizon = std::max(s.horizon_gamma / gamma, 16.0 * kTwoPi / s.omega_q);
        SledModel model{s.omega_q, bath, DriveSpec{}};
        EnsemblePlan ens;
        ens.n_traj = s.n_traj;
        ens.base_seed = s.base_seed;
        ens.workers = s.workers;
        const EnsembleSeries es = propagate_sled_ensemble(
            model, from_bloch({1.0, 0.0, 0.0}), StepPlan{dt, horizon, s.record_stride}, ens);
        const DampedCosineFit fit = free_decay_fit(es);
        pt.delta_s = fit.omega - s.omega_q;
        pt.stderr = fit.stderr[2];
      }
      pt.ok = true;
    } catch (const NumericalError& e) {
      pt.error = e.what();
    }
    out.points.push_back(pt);
  }
  std::vector<double> gx, sy;
  for (const auto& p : out.points) {
    if (!p.ok) continue;
    gx.push_back(p.gamma);
    sy.push_back(p.delta_s);
  }
  if (gx.size() >= 2) {
    out.fit = linear_fit(gx, sy);
    out.fit_ok = true;
  }
  return out;
}

}  // namespace sledsim
