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

#include "sledsim/harness/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include "sledsim/bath.hpp"
#include "sledsim/errors.hpp"
#include "sledsim/noise.hpp"
#include "sledsim/parallel.hpp"
#include "sledsim/parameters.hpp"
#include "sledsim/propagators.hpp"
#include "sledsim/readout.hpp"
#include "sledsim/spectroscopy.hpp"
#include "sledsim/steady.hpp"

#ifndef SLEDSIM_VERSION
#define SLEDSIM_VERSION "unknown"
#endif

namespace sledsim::harness {
namespace {

using nlohmann::json;

double horizon_scale(const RunOptions& o) { return o.profile == Profile::kFast ? 0.5 : 1.0; }

bool has_solver(const RunConfig& c, Solver s) {
  return std::find(c.solvers.begin(), c.solvers.end(), s) != c.solvers.end();
}

DensityMatrix thermal(const BathSpec& bath) {
  return from_bloch({0.0, 0.0, std::tanh(0.5 * bath.hbar_beta * bath.omega_q)});
}

/// One bath per listed gamma, or the configured bath when the list is empty.
std::vector<BathSpec> baths_for(const RunConfig& c, const std::vector<double>& gammas) {
  std::vector<BathSpec> out;
  if (gammas.empty()) {
    out.push_back(c.bath());
  } else {
    for (double g : gammas) out.push_back(c.bath_for(g));
  }
  for (const auto& b : out) b.validate();
  return out;
}

double drive_frequency(const RunConfig& c, DrivePolicy fallback, Solver s, const BathSpec& bath) {
  if (c.policy.value_or(fallback) == DrivePolicy::kBare) return c.omega_q;
  return drive_frequency_for(s, c.omega_q, energy_shift(bath));
}

std::string tag(std::size_t i) { return "g" + std::to_string(i); }

struct SolverRun {
  StateSeries series;
  std::optional<EnsembleSeries> ensemble;  // SLED only
  double window_z_mean = 0.0;
  double window_z_stderr = 0.0;
};

SolverRun run_solver(Solver s, const RunConfig& c, const RunOptions& o, const BathSpec& bath,
                     const DriveSpec& drive, const DensityMatrix& rho0, const StepPlan& plan,
                     std::optional<std::pair<double, double>> z_window) {
  SolverRun r;
  if (s == Solver::kSled) {
    EnsemblePlan ens;
    ens.n_traj = c.trajectories(o.profile);
    ens.base_seed = c.base_seed;
    ens.workers = o.workers;
    ens.z_window = z_window;
    r.ensemble = propagate_sled_ensemble(SledModel{c.omega_q, bath, drive}, rho0, plan, ens);
    r.window_z_mean = r.ensemble->window_z_mean;
    r.window_z_stderr = r.ensemble->window_z_stderr;
    r.series = *r.ensemble;
  } else {
    LindbladModel model{c.omega_q, rates(bath, s == Solver::kLme), drive, s == Solver::kLme};
    r.series = propagate_lme(model, rho0, plan);
    if (z_window) {
      std::vector<double> z;
      for (const auto& rho : r.series.states) z.push_back((rho(0, 0) - rho(1, 1)).real());
      r.window_z_mean = window_average(r.series.times, z, z_window->first, z_window->second);
    }
  }
  return r;
}

std::vector<double> read_sigma_column(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("readout.source: cannot open " + path);
  std::string line;
  if (!std::getline(f, line)) throw ConfigError("readout.source: empty file " + path);
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::stringstream ss(l);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  const auto header = split(line);
  const auto it = std::find(header.begin(), header.end(), "sigma_z_bar");
  if (it == header.end()) throw ConfigError("readout.source: no sigma_z_bar column in " + path);
  const auto col = static_cast<std::size_t>(it - header.begin());
  std::vector<double> out;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() <= col) throw ConfigError("readout.source: short row in " + path);
    try {
      out.push_back(std::stod(cells[col]));
    } catch (const std::exception&) {
      throw ConfigError("readout.source: bad number '" + cells[col] + "' in " + path);
    }
  }
  return out;
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

}  // namespace

json cmd_dynamics(const RunConfig& c, const RunOptions& o, OutputDir& out) {
  const auto baths = baths_for(c, c.dynamics.gammas);
  const bool sled = has_solver(c, Solver::kSled);
  const Solver reference = sled ? Solver::kSled : c.solvers.front();
  const DensityMatrix rho0 = DensityMatrix::excited();

  Table summary{{"gamma", "reference", "solver", "fidelity", "points", "max_clip"}, {}};
  json results = json::array();
  for (std::size_t i = 0; i < baths.size(); ++i) {
    const BathSpec& bath = baths[i];
    const double gamma = bath.gamma();
    if (!(gamma > 0.0)) throw ConfigError("dynamics: gamma must be positive");
    const double window = c.dynamics.window_gamma / gamma;
    const double t_final = c.t_final.value_or(window);

    std::vector<double> omega_d;
    double w_max = c.omega_q;
    for (Solver s : c.solvers) {
      omega_d.push_back(drive_frequency(c, DrivePolicy::kBare, s, bath));
      w_max = std::max(w_max, omega_d.back());
    }
    // One step for every solver so the fidelity compares equal time grids.
    const double dt = c.dt.value_or(sled ? default_sled_step(w_max, c.omega_c) : default_lme_step(w_max));
    const std::size_t stride = c.record_stride.value_or(
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(kTwoPi / (c.omega_q * dt) / 16.0))));
    const StepPlan plan{dt, t_final, stride};

    std::vector<SolverRun> runs;
    for (std::size_t k = 0; k < c.solvers.size(); ++k) {
      const Solver s = c.solvers[k];
      runs.push_back(run_solver(s, c, o, bath, DriveSpec::single(c.Omega_d, omega_d[k]), rho0, plan,
                                std::nullopt));
      const SolverRun& r = runs.back();
      const bool with_err = s == Solver::kSled;
      Table t{{"t", "sx", "sy", "sz"}, {}};
      if (with_err) t.columns.insert(t.columns.end(), {"sx_stderr", "sy_stderr", "sz_stderr"});
      for (std::size_t n = 0; n < r.series.times.size(); ++n) {
        const double tn = r.series.times[n];
        const BlochVector v = rotating_frame_bloch(r.series.states[n], omega_d[k], tn);
        std::vector<Cell> row{tn, v.x, v.y, v.z};
        if (with_err) {
          const BlochVector e = rotating_frame_stderr(*r.ensemble, n, omega_d[k]);
          row.insert(row.end(), {e.x, e.y, e.z});
        }
        t.add(std::move(row));
      }
      out.write_table("dynamics_" + std::string(solver_name(s)) + "_" + tag(i), t);
    }

    json entry{{"gamma", gamma}, {"dt", dt}, {"t_final", t_final}, {"record_stride", stride},
               {"omega_d", json::object()}, {"fidelity", json::object()}};
    for (std::size_t k = 0; k < c.solvers.size(); ++k)
      entry["omega_d"][solver_name(c.solvers[k])] = omega_d[k];
    const auto ref = static_cast<std::size_t>(
        std::find(c.solvers.begin(), c.solvers.end(), reference) - c.solvers.begin());
    for (std::size_t k = 0; k < c.solvers.size(); ++k) {
      if (k == ref) continue;
      const WindowFidelity f =
          window_fidelity(runs[ref].series, runs[k].series, 0.0, std::min(window, t_final));
      summary.add({gamma, std::string(solver_name(reference)), std::string(solver_name(c.solvers[k])),
                   f.mean, static_cast<std::int64_t>(f.points), f.max_clip});
      entry["fidelity"][solver_name(c.solvers[k])] = f.mean;
    }
    results.push_back(entry);
  }
  if (!summary.rows.empty()) out.write_table("fidelity_summary", summary);
  return {{"runs", results}, {"reference", solver_name(reference)}};
}

json cmd_steady(const RunConfig& c, const RunOptions& o, OutputDir& out) {
  std::vector<double> map_gammas = c.steady.map_gammas;
  if (map_gammas.empty()) {
    // 40-point log grid over [1e-3, 1e-1] omega_q.
    for (int i = 0; i < 40; ++i) map_gammas.push_back(c.omega_q * std::pow(10.0, -3.0 + 2.0 * i / 39.0));
  }
  const std::vector<double> deltas = c.steady.delta_over_Omega.values();

  Table maps[3];
  const char* names[3] = {"delta_sigma_x", "delta_sigma_y", "delta_sigma_z"};
  for (auto& m : maps) m.columns = {"gamma", "delta_q_over_Omega", "value"};
  Table markers{{"gamma", "delta_s", "delta_s_over_Omega"}, {}};
  for (double g : map_gammas) {
    const BathSpec bath = c.bath_for(g);
    bath.validate();
    const BathRates r = rates(bath);
    markers.add({g, r.delta_s, r.delta_s / c.Omega_d});
    for (double d : deltas) {
      const BlochVector v = delta_sigma({c.Omega_d, r.gamma, r.gamma_beta, d * c.Omega_d});
      maps[0].add({g, d, v.x});
      maps[1].add({g, d, v.y});
      maps[2].add({g, d, v.z});
    }
  }
  for (int k = 0; k < 3; ++k) out.write_table(names[k], maps[k]);
  out.write_table("shift_markers", markers);

  // Witness with a bare drive: Delta_q = Delta_s of each solver.
  std::vector<double> witness_gammas = c.steady.witness_gammas;
  if (witness_gammas.empty())
    for (double x : {0.01, 0.02, 0.05, 0.1}) witness_gammas.push_back(x * c.omega_q);
  Table witness{{"gamma", "value", "stderr", "solver"}, {}};
  json sled_rows = json::array();
  for (double g : witness_gammas) {
    const BathSpec bath = c.bath_for(g);
    bath.validate();
    const BathRates r = rates(bath);
    const SteadyParams at_res{c.Omega_d, r.gamma, r.gamma_beta, 0.0};
    for (Solver s : c.solvers) {
      if (s == Solver::kSled) continue;
      const double shift = s == Solver::kLme ? r.delta_s : 0.0;
      witness.add({g, delta_sigma(at_res.at_detuning(shift)).z, 0.0, std::string(solver_name(s))});
    }
    if (!has_solver(c, Solver::kSled)) continue;
    const double guard = c.steady.guard_gamma / g * horizon_scale(o);
    const double window = c.steady.window_gamma / g * horizon_scale(o);
    const double dt = c.dt.value_or(default_sled_step(c.omega_q, c.omega_c));
    const StepPlan plan{dt, guard + window, c.record_stride.value_or(1)};
    const SolverRun run = run_solver(Solver::kSled, c, o, bath, DriveSpec::single(c.Omega_d, c.omega_q),
                                     thermal(bath), plan, std::make_pair(guard, guard + window));
    const double value = failure_measure(run.window_z_mean, at_res);
    witness.add({g, value, run.window_z_stderr, std::string("sled")});
    sled_rows.push_back({{"gamma", g}, {"value", value}, {"stderr", run.window_z_stderr},
                         {"guard", guard}, {"window", window}, {"dt", dt}});
  }
  out.write_table("witness", witness);
  return {{"map_points", map_gammas.size() * deltas.size()}, {"sled_witness", sled_rows}};
}

json cmd_shift(const RunConfig& c, const RunOptions& o, OutputDir& out) {
  std::vector<double> gammas = c.shift.gammas;
  if (gammas.empty())
    for (double mhz : {2.5, 10.0, 50.0, 100.0, 250.0, 500.0}) gammas.push_back(kTwoPi * mhz * 1e6);

  ShiftSetup setup;
  setup.omega_q = c.omega_q;
  setup.omega_c = c.omega_c;
  setup.hbar_beta = c.hbar_beta;
  setup.gammas = gammas;
  setup.n_traj = c.trajectories(o.profile);
  setup.base_seed = c.base_seed;
  setup.workers = o.workers;
  setup.dt = c.dt.value_or(0.0);
  setup.horizon_gamma = c.shift.horizon_gamma * horizon_scale(o);
  if (c.record_stride) setup.record_stride = *c.record_stride;

  ShiftScan analytic, sled;
  if (c.shift.analytic) {
    setup.method = ShiftMethod::kLmeAnalytic;
    analytic = shift_scan(setup);
  }
  if (c.shift.sled) {
    setup.method = ShiftMethod::kSledFit;
    sled = shift_scan(setup);
  }

  const double nan = std::nan("");
  Table t{{"gamma", "delta_s_lme", "delta_s_sled", "stderr", "error"}, {}};
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    const double lme = c.shift.analytic && analytic.points[i].ok ? analytic.points[i].delta_s : nan;
    double fit = nan, err = nan;
    std::string msg;
    if (c.shift.sled) {
      const ShiftPoint& p = sled.points[i];
      if (p.ok) {
        fit = p.delta_s;
        err = p.stderr;
      }
      msg = p.error;
    }
    t.add({gammas[i], lme, fit, err, msg});
  }
  out.write_table("shift", t);

  auto fit_json = [](const ShiftScan& s, bool enabled) -> json {
    if (!enabled || !s.fit_ok) return nullptr;
    return {{"slope", s.fit.slope},          {"intercept", s.fit.intercept},
            {"r_squared", s.fit.r_squared},  {"slope_stderr", s.fit.slope_stderr},
            {"intercept_stderr", s.fit.intercept_stderr}};
  };
  const json summary{{"lme_analytic", fit_json(analytic, c.shift.analytic)},
                     {"sled_fit", fit_json(sled, c.shift.sled)},
                     {"n_traj", setup.n_traj},
                     {"horizon_gamma", setup.horizon_gamma}};
  out.write_json("shift_fit", summary);
  return summary;
}

json cmd_pump_probe(const RunConfig& c, const RunOptions& o, OutputDir& out) {
  std::vector<double> gammas = c.pump_probe.gammas;
  if (gammas.empty()) gammas.push_back(0.1 * c.Omega_d);
  std::vector<double> offsets = c.pump_probe.offsets;
  if (offsets.empty())
    for (int i = 0; i <= 80; ++i) offsets.push_back(c.Omega_d * (-2.0 + 4.0 * i / 80.0));

  json results = json::array();
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    const BathSpec bath = c.bath_for(gammas[i]);
    bath.validate();
    for (Solver s : c.solvers) {
      PumpProbeSetup setup;
      setup.solver = s;
      setup.omega_q = c.omega_q;
      setup.bath = bath;
      setup.Omega_d = c.Omega_d;
      setup.omega_d = drive_frequency(c, DrivePolicy::kShifted, s, bath);
      setup.Omega_p = c.Omega_p;
      for (double d : offsets) setup.omega_p_grid.push_back(setup.omega_d + d);
      setup.n_p = c.pump_probe.n_p;
      setup.guard = 10.0 / gammas[i] * horizon_scale(o);
      setup.dt = c.dt.value_or(0.0);
      setup.n_traj = c.trajectories(o.profile);
      setup.base_seed = c.base_seed;
      setup.workers = o.workers;
      const ProbeScan scan = pump_probe_scan(setup);

      Table t{{"omega_p", "sigma_z_bar", "h_z", "A", "stderr", "window", "fallback"}, {}};
      std::vector<double> x, h;
      for (const auto& p : scan.points) {
        t.add({p.omega_p, p.sigma_z_bar, p.h_z, transmitted_amplitude(c.readout.resonator, p.sigma_z_bar),
               p.sigma_z_stderr, p.window, static_cast<std::int64_t>(p.fallback)});
        x.push_back(p.omega_p);
        h.push_back(p.h_z);
      }
      const std::string name = "pump_probe_" + std::string(solver_name(s)) + "_" + tag(i);
      out.write_table(name, t);

      json entry{{"gamma", gammas[i]}, {"solver", solver_name(s)}, {"omega_d", setup.omega_d},
                 {"file", name + ".csv"}};
      if (c.pump_probe.fit) {
        try {
          const LorentzianPairFit f = fit_lorentzian_pair(x, h);
          entry["fit"] = {{"center", f.center},       {"width", f.width},
                          {"height", f.height},       {"baseline", f.baseline},
                          {"center_stderr", f.center_stderr}, {"width_stderr", f.width_stderr},
                          {"merged", f.merged},       {"relative_residual", f.relative_residual}};
        } catch (const NumericalError& e) {
          entry["fit"] = {{"error", e.what()}};
        }
      }
      results.push_back(entry);
    }
  }
  out.write_json("pump_probe_summary", results);
  return {{"scans", results}};
}

json cmd_noise_check(const RunConfig& c, const RunOptions& o, OutputDir& out) {
  const BathSpec bath = c.bath();
  bath.validate();
  // Default spacing puts the noise Nyquist at 16 omega_c, as in SLED runs.
  const NoiseGrid grid{c.dt.value_or(kPi / (16.0 * c.omega_c)), c.noise_check.record_points};
  grid.validate();
  std::vector<double> lags;
  for (long l : c.noise_check.lags_dt) lags.push_back(static_cast<double>(l) * grid.dt);

  const NoiseKernel kernel = build_kernel(bath, grid);
  NoiseSynthesizer synth(grid);
  AutocorrelationAccumulator acc(grid, lags);
  NoiseTrajectory traj;
  const std::size_t n = c.trajectories(o.profile);
  for (std::size_t k = 0; k < n; ++k) {
    synth.synthesize(kernel, c.base_seed + k, traj);
    acc.add(traj);
  }
  const auto est = acc.result();

  Table t{{"tau", "lag_dt", "L_prime_target", "estimate", "stderr", "z_score"}, {}};
  json rows = json::array();
  double worst = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    const double target = real_correlation_reduced(bath, est[i].tau);
    const double z = est[i].stderr > 0.0 ? (est[i].mean - target) / est[i].stderr : 0.0;
    worst = std::max(worst, std::abs(z));
    t.add({est[i].tau, static_cast<std::int64_t>(c.noise_check.lags_dt[i]), target, est[i].mean,
           est[i].stderr, z});
  }
  out.write_table("noise_check", t);
  return {{"n_traj", n}, {"dt", grid.dt}, {"record_points", grid.n}, {"max_abs_z", worst}};
}

json cmd_readout(const RunConfig& c, const RunOptions&, OutputDir& out) {
  const ResonatorSpec& res = c.readout.resonator;
  res.validate();
  std::vector<double> sigmas = c.readout.sigma_z_bar;
  if (!c.readout.source.empty()) {
    const auto more = read_sigma_column(c.readout.source);
    sigmas.insert(sigmas.end(), more.begin(), more.end());
  }
  if (sigmas.empty()) sigmas = {-1.0, -0.5, 0.0, 0.5, 1.0};
  for (double s : sigmas)
    if (!(std::abs(s) <= 1.0)) throw DomainError("readout: sigma_z_bar must lie in [-1, 1]");

  const double t_read = c.readout.t_read > 0.0 ? c.readout.t_read : 20.0 / res.kappa;
  const double dt = c.dt.value_or(1e-3 / res.kappa);
  const double scale = res.Omega_m > 0.0 ? res.Omega_m / res.kappa : 1.0;

  Table t{{"sigma_z_bar", "A", "I", "Q", "phi", "A_steady", "ode_deviation", "ode_deviation_raw"}, {}};
  double worst = 0.0;
  for (double s : sigmas) {
    const FieldPoint p = cavity_field_closed_form(res, s, {0.0, 0.0}, t_read);
    const auto ode = cavity_field_ode(res, [s](double) { return s; }, {0.0, 0.0}, dt, t_read);
    double dev = 0.0;
    for (const auto& q : ode)
      dev = std::max(dev, std::abs(q.a - cavity_field_closed_form(res, s, {0.0, 0.0}, q.t).a));
    worst = std::max(worst, dev / scale);
    t.add({s, p.A, p.I, p.Q, p.phi, transmitted_amplitude(res, s), dev / scale, dev});
  }
  out.write_table("readout", t);
  return {{"t_read", t_read}, {"ode_dt", dt}, {"max_ode_deviation", worst}};
}

Command find_command(const std::string& name) {
  if (name == "dynamics") return cmd_dynamics;
  if (name == "steady") return cmd_steady;
  if (name == "shift") return cmd_shift;
  if (name == "pump-probe") return cmd_pump_probe;
  if (name == "noise-check") return cmd_noise_check;
  if (name == "readout") return cmd_readout;
  return nullptr;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"dynamics", "steady",      "shift",
                                              "pump-probe", "noise-check", "readout"};
  return names;
}

json run_command(const std::string& name, const RunConfig& config, const RunOptions& options,
                 const std::filesystem::path& out_dir) {
  const Command cmd = find_command(name);
  if (!cmd) throw ConfigError("command: unknown command '" + name + "'");
  OutputDir out(out_dir);
  const std::string started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  const json results = cmd(config, options, out);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const BathSpec bath = config.bath();
  json derived{{"eta", bath.eta}, {"gamma", bath.gamma()}};
  if (bath.eta > 0.0) {
    const BathRates r = rates(bath);
    derived["gamma_beta"] = r.gamma_beta;
    derived["Gamma_down"] = r.Gamma_down;
    derived["Gamma_up"] = r.Gamma_up;
    derived["delta_s"] = {{"lme", r.delta_s}, {"lme-nes", 0.0}, {"sled", r.delta_s}};
  }
  derived["n_bar"] = bose_occupation(bath, config.omega_q);

  json resolved{{"omega_q", config.omega_q},   {"omega_c", config.omega_c},
                {"hbar_beta", config.hbar_beta}, {"Omega_d", config.Omega_d},
                {"Omega_p", config.Omega_p},   {"eta", bath.eta},
                {"solvers", json::array()}};
  for (Solver s : config.solvers) resolved["solvers"].push_back(solver_name(s));
  if (config.temperature) resolved["temperature"] = *config.temperature;
  if (config.dt) resolved["dt"] = *config.dt;
  if (config.t_final) resolved["t_final"] = *config.t_final;

  json files = json::array();
  for (const auto& f : out.files()) files.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});

  json manifest{{"tool", "sledsim"},
                {"version", SLEDSIM_VERSION},
                {"command", name},
                {"profile", profile_name(options.profile)},
                {"config", config.source},
                {"quantities", echo_quantities(config)},
                {"resolved", resolved},
                {"derived", derived},
                {"seeds", {{"base_seed", config.base_seed}, {"n_traj", config.trajectories(options.profile)}}},
                {"workers", resolve_workers(options.workers)},
                {"started_utc", started},
                {"wall_clock_s", wall},
                {"results", results},
                {"files", files}};
  std::ofstream(out.root() / "manifest.json") << manifest.dump(1) << "\n";
  return manifest;
}

}  // namespace sledsim::harness
