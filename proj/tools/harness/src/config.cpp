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

#include "sledsim/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "sledsim/errors.hpp"
#include "sledsim/parameters.hpp"

namespace sledsim::harness {
namespace {

using nlohmann::json;

// Field reader that tracks the JSON path and rejects unknown keys.
class Reader {
 public:
  Reader(const json& j, std::string path, RunConfig& cfg) : j_(j), path_(std::move(path)), cfg_(cfg) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  bool has(const std::string& key) {
    known_.insert(key);
    return j_.contains(key);
  }

  Reader section(const std::string& key) {
    known_.insert(key);
    static const json empty = json::object();
    return Reader(j_.contains(key) ? j_.at(key) : empty, child(key), cfg_);
  }

  std::optional<double> quantity(const std::string& key, UnitKind kind) {
    if (!has(key)) return std::nullopt;
    return read_quantity(j_.at(key), child(key), kind);
  }

  std::optional<std::vector<double>> quantity_list(const std::string& key, UnitKind kind) {
    if (!has(key)) return std::nullopt;
    const json& v = j_.at(key);
    const std::string p = child(key);
    std::vector<double> out;
    if (v.is_array()) {
      for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(read_quantity(v[i], p + "[" + std::to_string(i) + "]", kind));
    } else if (v.is_object() && v.contains("values") && v.contains("unit")) {
      if (v.size() != 2) throw ConfigError(p + ": list object takes only 'values' and 'unit'");
      const json& vals = v.at("values");
      if (!vals.is_array() || !v.at("unit").is_string())
        throw ConfigError(p + ": expected {\"values\": [...], \"unit\": \"...\"}");
      for (std::size_t i = 0; i < vals.size(); ++i) {
        json q{{"value", vals[i]}, {"unit", v.at("unit")}};
        out.push_back(read_quantity(q, p + "[" + std::to_string(i) + "]", kind));
      }
    } else {
      throw ConfigError(p + ": expected a list of {value, unit} objects");
    }
    return out;
  }

  /// Pure number; {value, unit: dimensionless} also accepted.
  std::optional<double> number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const json& v = j_.at(key);
    if (v.is_number()) return v.get<double>();
    return read_quantity(v, child(key), UnitKind::kDimensionless);
  }

  std::optional<long long> integer(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(child(key) + ": expected an integer");
    return v.get<long long>();
  }

  std::optional<bool> boolean(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(child(key) + ": expected true or false");
    return v.get<bool>();
  }

  std::optional<std::string> string(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(child(key) + ": expected a string");
    return v.get<std::string>();
  }

  std::optional<std::vector<std::string>> strings(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const json& v = j_.at(key);
    if (v.is_string()) return std::vector<std::string>{v.get<std::string>()};
    if (!v.is_array()) throw ConfigError(child(key) + ": expected a string or list of strings");
    std::vector<std::string> out;
    for (const auto& e : v) {
      if (!e.is_string()) throw ConfigError(child(key) + ": expected strings");
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  void finish() const {
    for (const auto& [k, _] : j_.items())
      if (!known_.count(k)) throw ConfigError(child(k) + ": unknown field");
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }

  double read_quantity(const json& v, const std::string& p, UnitKind kind) {
    if (!v.is_object() || !v.contains("value") || !v.contains("unit") || v.size() != 2)
      throw ConfigError(p + ": expected {\"value\": number, \"unit\": string}");
    if (!v.at("value").is_number() || !v.at("unit").is_string())
      throw ConfigError(p + ": value must be a number and unit a string");
    Quantity q{v.at("value").get<double>(), v.at("unit").get<std::string>()};
    const double internal = to_internal(q, kind, p);
    cfg_.quantities[p] = {internal, q.unit};
    return internal;
  }

  const json& j_;
  std::string path_;
  RunConfig& cfg_;
  std::set<std::string> known_;
};

Solver parse_solver(const std::string& s, const std::string& path) {
  if (s == "lme") return Solver::kLme;
  if (s == "lme-nes") return Solver::kLmeNoShift;
  if (s == "sled") return Solver::kSled;
  throw ConfigError(path + ": unknown solver '" + s + "' (lme, lme-nes, sled)");
}

double positive(double v, const std::string& path) {
  if (!(v > 0.0)) throw ConfigError(path + ": must be positive");
  return v;
}

}  // namespace

Profile parse_profile(const std::string& name) {
  if (name == "fast") return Profile::kFast;
  if (name == "paper") return Profile::kPaper;
  throw ConfigError("profile: expected 'fast' or 'paper', got '" + name + "'");
}

const char* profile_name(Profile p) { return p == Profile::kFast ? "fast" : "paper"; }

std::vector<double> LinearGrid::values() const {
  std::vector<double> v;
  if (points == 1) return {start};
  for (std::size_t i = 0; i < points; ++i)
    v.push_back(start + (stop - start) * static_cast<double>(i) / static_cast<double>(points - 1));
  return v;
}

BathSpec RunConfig::bath_for(double g) const { return BathSpec::from_gamma(g, omega_c, hbar_beta, omega_q); }

BathSpec RunConfig::bath() const {
  if (eta) return {*eta, omega_c, hbar_beta, omega_q};
  return bath_for(gamma.value_or(kDefaults.gamma));
}

std::size_t RunConfig::trajectories(Profile p) const {
  if (n_traj) return *n_traj;
  return p == Profile::kFast ? 500 : 10000;
}

RunConfig default_config() {
  RunConfig c;
  c.omega_q = kDefaults.omega_q;
  c.omega_c = kDefaults.omega_c;
  c.hbar_beta = kDefaults.hbar_beta();
  c.Omega_d = kDefaults.Omega_d;
  c.Omega_p = kDefaults.Omega_p;
  c.solvers = {Solver::kLme, Solver::kLmeNoShift, Solver::kSled};
  c.readout.resonator = {kDefaults.omega_r, kDefaults.kappa, kDefaults.chi, kDefaults.Omega_m,
                         kDefaults.omega_r};
  return c;
}

RunConfig parse_config(const json& doc) {
  RunConfig c = default_config();
  c.source = doc;
  Reader root(doc, "", c);

  {
    Reader q = root.section("qubit");
    if (auto v = q.quantity("omega_q", UnitKind::kFrequency)) c.omega_q = positive(*v, "qubit.omega_q");
    q.finish();
  }
  {
    Reader b = root.section("bath");
    if (auto v = b.quantity("gamma", UnitKind::kFrequency)) c.gamma = *v;
    if (auto v = b.number("eta")) c.eta = *v;
    if (c.gamma && c.eta) throw ConfigError("bath: give either gamma or eta, not both");
    if (auto v = b.quantity("omega_c", UnitKind::kFrequency)) c.omega_c = positive(*v, "bath.omega_c");
    auto t = b.quantity("temperature", UnitKind::kTemperature);
    auto x = b.number("hbar_beta_omega_q");
    if (t && x) throw ConfigError("bath: give either temperature or hbar_beta_omega_q, not both");
    if (t) {
      c.temperature = positive(*t, "bath.temperature");
      c.hbar_beta = hbar_beta_from_kelvin(*t);
    } else {
      c.hbar_beta = positive(x.value_or(kDefaults.hbar_beta_omega_q), "bath.hbar_beta_omega_q") / c.omega_q;
    }
    b.finish();
    if (c.gamma && !(*c.gamma >= 0.0)) throw ConfigError("bath.gamma: must be >= 0");
    if (c.eta && !(*c.eta >= 0.0)) throw ConfigError("bath.eta: must be >= 0");
  }
  {
    Reader d = root.section("drive");
    if (auto v = d.quantity("Omega_d", UnitKind::kFrequency)) c.Omega_d = positive(*v, "drive.Omega_d");
    if (auto v = d.quantity("Omega_p", UnitKind::kFrequency)) {
      if (*v < 0.0) throw ConfigError("drive.Omega_p: must be >= 0");
      c.Omega_p = *v;
    }
    if (auto v = d.string("omega_d_policy")) {
      if (*v == "bare")
        c.policy = DrivePolicy::kBare;
      else if (*v == "shifted")
        c.policy = DrivePolicy::kShifted;
      else
        throw ConfigError("drive.omega_d_policy: expected 'bare' or 'shifted'");
    }
    d.finish();
  }
  if (auto v = root.strings("solver")) {
    c.solvers.clear();
    for (std::size_t i = 0; i < v->size(); ++i)
      c.solvers.push_back(parse_solver((*v)[i], "solver[" + std::to_string(i) + "]"));
    if (c.solvers.empty()) throw ConfigError("solver: list is empty");
  }
  {
    Reader p = root.section("plan");
    if (auto v = p.quantity("dt", UnitKind::kTime)) c.dt = positive(*v, "plan.dt");
    if (auto v = p.quantity("t_final", UnitKind::kTime)) c.t_final = positive(*v, "plan.t_final");
    if (auto v = p.integer("n_traj")) {
      if (*v < 1) throw ConfigError("plan.n_traj: must be >= 1");
      c.n_traj = static_cast<std::size_t>(*v);
    }
    if (auto v = p.integer("base_seed")) {
      if (*v < 0) throw ConfigError("plan.base_seed: must be >= 0");
      c.base_seed = static_cast<std::uint64_t>(*v);
    }
    if (auto v = p.integer("record_stride")) {
      if (*v < 1) throw ConfigError("plan.record_stride: must be >= 1");
      c.record_stride = static_cast<std::size_t>(*v);
    }
    p.finish();
  }
  {
    Reader s = root.section("dynamics");
    if (auto v = s.quantity_list("gammas", UnitKind::kFrequency)) c.dynamics.gammas = *v;
    if (auto v = s.number("window_gamma")) c.dynamics.window_gamma = positive(*v, "dynamics.window_gamma");
    s.finish();
  }
  {
    Reader s = root.section("steady");
    if (auto v = s.quantity_list("gammas", UnitKind::kFrequency)) c.steady.map_gammas = *v;
    if (s.has("delta_over_Omega")) {
      Reader g = s.section("delta_over_Omega");
      c.steady.delta_over_Omega.start = g.number("start").value_or(-10.0);
      c.steady.delta_over_Omega.stop = g.number("stop").value_or(10.0);
      const auto n = g.integer("points").value_or(41);
      if (n < 1) throw ConfigError("steady.delta_over_Omega.points: must be >= 1");
      c.steady.delta_over_Omega.points = static_cast<std::size_t>(n);
      g.finish();
    }
    if (auto v = s.quantity_list("witness_gammas", UnitKind::kFrequency)) c.steady.witness_gammas = *v;
    if (auto v = s.number("guard_gamma")) c.steady.guard_gamma = positive(*v, "steady.guard_gamma");
    if (auto v = s.number("window_gamma")) c.steady.window_gamma = positive(*v, "steady.window_gamma");
    s.finish();
  }
  {
    Reader s = root.section("shift");
    if (auto v = s.quantity_list("gammas", UnitKind::kFrequency)) c.shift.gammas = *v;
    if (auto v = s.strings("methods")) {
      c.shift.analytic = c.shift.sled = false;
      for (const auto& m : *v) {
        if (m == "lme-analytic")
          c.shift.analytic = true;
        else if (m == "sled-fit")
          c.shift.sled = true;
        else
          throw ConfigError("shift.methods: unknown method '" + m + "' (lme-analytic, sled-fit)");
      }
    }
    if (auto v = s.number("horizon_gamma")) c.shift.horizon_gamma = positive(*v, "shift.horizon_gamma");
    s.finish();
  }
  {
    Reader s = root.section("pump_probe");
    if (auto v = s.quantity_list("gammas", UnitKind::kFrequency)) c.pump_probe.gammas = *v;
    if (auto v = s.quantity_list("offsets", UnitKind::kFrequency)) c.pump_probe.offsets = *v;
    if (auto v = s.integer("n_p")) {
      if (*v < 1) throw ConfigError("pump_probe.n_p: must be >= 1");
      c.pump_probe.n_p = static_cast<int>(*v);
    }
    if (auto v = s.boolean("fit")) c.pump_probe.fit = *v;
    s.finish();
  }
  {
    Reader s = root.section("noise_check");
    if (s.has("lags_dt")) {
      const json& v = doc.at("noise_check").at("lags_dt");
      if (!v.is_array()) throw ConfigError("noise_check.lags_dt: expected a list of integers");
      c.noise_check.lags_dt.clear();
      for (const auto& e : v) {
        if (!e.is_number_integer()) throw ConfigError("noise_check.lags_dt: expected integers");
        c.noise_check.lags_dt.push_back(e.get<long>());
      }
    }
    if (auto v = s.integer("record_points")) {
      if (*v < 64 || (*v & (*v - 1)) != 0)
        throw ConfigError("noise_check.record_points: must be a power of two >= 64");
      c.noise_check.record_points = static_cast<std::size_t>(*v);
    }
    s.finish();
  }
  {
    Reader s = root.section("readout");
    auto& r = c.readout.resonator;
    if (auto v = s.quantity("omega_r", UnitKind::kFrequency)) r.omega_r = *v;
    if (auto v = s.quantity("kappa", UnitKind::kFrequency)) r.kappa = positive(*v, "readout.kappa");
    if (auto v = s.quantity("chi", UnitKind::kFrequency)) r.chi = *v;
    if (auto v = s.quantity("Omega_m", UnitKind::kFrequency)) r.Omega_m = *v;
    if (auto v = s.quantity("omega_m", UnitKind::kFrequency))
      r.omega_m = *v;
    else
      r.omega_m = r.omega_r;
    if (s.has("sigma_z_bar")) {
      const json& v = doc.at("readout").at("sigma_z_bar");
      if (!v.is_array()) throw ConfigError("readout.sigma_z_bar: expected a list of numbers");
      for (const auto& e : v) {
        if (!e.is_number()) throw ConfigError("readout.sigma_z_bar: expected numbers");
        c.readout.sigma_z_bar.push_back(e.get<double>());
      }
    }
    if (auto v = s.string("source")) c.readout.source = *v;
    if (auto v = s.quantity("t_read", UnitKind::kTime)) c.readout.t_read = positive(*v, "readout.t_read");
    s.finish();
    try {
      r.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("readout: ") + e.what());
    }
  }
  root.section("output").finish();
  root.finish();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open " + path);
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
  return parse_config(doc);
}

json echo_quantities(const RunConfig& config) {
  json out = json::object();
  for (const auto& [path, q] : config.quantities)
    out[path] = {{"value", from_internal(q.value, q.unit)}, {"unit", q.unit}};
  return out;
}

}  // namespace sledsim::harness
