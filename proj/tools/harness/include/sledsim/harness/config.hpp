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

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "sledsim/bath.hpp"
#include "sledsim/readout.hpp"
#include "sledsim/spectroscopy.hpp"
#include "sledsim/harness/units.hpp"

namespace sledsim::harness {

enum class Profile { kFast, kPaper };

Profile parse_profile(const std::string& name);
const char* profile_name(Profile p);

/// Drive frequency choice: bare puts omega_d at omega_q, shifted at
/// omega_q + Delta_s of the solver in use.
enum class DrivePolicy { kBare, kShifted };

struct LinearGrid {
  double start = 0.0;
  double stop = 0.0;
  std::size_t points = 0;

  std::vector<double> values() const;
};

struct DynamicsSection {
  std::vector<double> gammas;
  double window_gamma = 10.0;
};

struct SteadySection {
  std::vector<double> map_gammas;
  /// Delta_q grid in units of Omega_d.
  LinearGrid delta_over_Omega{-10.0, 10.0, 41};
  std::vector<double> witness_gammas;
  double guard_gamma = 10.0;
  double window_gamma = 10.0;
};

struct ShiftSection {
  std::vector<double> gammas;
  bool analytic = true;
  bool sled = true;
  double horizon_gamma = 3.0;
};

struct PumpProbeSection {
  std::vector<double> gammas;
  /// Probe grid as offsets from omega_d; empty selects +-2 Omega_d.
  std::vector<double> offsets;
  int n_p = 20;
  bool fit = false;
};

struct NoiseCheckSection {
  std::vector<long> lags_dt{0, 1, 2, 5, 10};
  std::size_t record_points = 4096;
};

struct ReadoutSection {
  ResonatorSpec resonator;
  std::vector<double> sigma_z_bar;
  std::string source;
  /// Readout time; 0 selects 20 / kappa.
  double t_read = 0.0;
};

struct RunConfig {
  double omega_q = 0.0;

  std::optional<double> gamma;
  std::optional<double> eta;
  double omega_c = 0.0;
  double hbar_beta = 0.0;
  std::optional<double> temperature;  ///< K, when given in the config

  double Omega_d = 0.0;
  double Omega_p = 0.0;
  std::optional<DrivePolicy> policy;

  std::vector<Solver> solvers;

  std::optional<double> dt;
  std::optional<double> t_final;
  std::optional<std::size_t> n_traj;
  std::uint64_t base_seed = 0;
  std::optional<std::size_t> record_stride;

  DynamicsSection dynamics;
  SteadySection steady;
  ShiftSection shift;
  PumpProbeSection pump_probe;
  NoiseCheckSection noise_check;
  ReadoutSection readout;

  /// Every quantity keyed by its JSON path: internal value, unit as written.
  std::map<std::string, Quantity> quantities;
  nlohmann::json source = nlohmann::json::object();

  /// Bath for a given gamma with this config's omega_c and temperature.
  BathSpec bath_for(double gamma) const;
  /// The configured bath (gamma or eta given, else the defaults).
  BathSpec bath() const;
  std::size_t trajectories(Profile p) const;
};

/// Default parameter set (kDefaults).
RunConfig default_config();

/// Parses a JSON document over the defaults. ConfigError names the field.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

/// Config quantities re-expressed in their original units from the parsed
/// internal values, as {path: {value, unit}}.
nlohmann::json echo_quantities(const RunConfig& config);

}  // namespace sledsim::harness
