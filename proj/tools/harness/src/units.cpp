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

#include "sledsim/harness/units.hpp"

#include <cmath>
#include <map>

#include "sledsim/errors.hpp"
#include "sledsim/parameters.hpp"

namespace sledsim::harness {
namespace {

struct UnitInfo {
  UnitKind kind;
  double factor;  // internal = value * factor
};

const std::map<std::string, UnitInfo>& table() {
  static const std::map<std::string, UnitInfo> t{
      {"GHz", {UnitKind::kFrequency, kTwoPi * 1e9}},
      {"MHz", {UnitKind::kFrequency, kTwoPi * 1e6}},
      {"kHz", {UnitKind::kFrequency, kTwoPi * 1e3}},
      {"rad_per_s", {UnitKind::kFrequency, 1.0}},
      {"mK", {UnitKind::kTemperature, 1e-3}},
      {"dimensionless", {UnitKind::kDimensionless, 1.0}},
      {"s", {UnitKind::kTime, 1.0}},
      {"ms", {UnitKind::kTime, 1e-3}},
      {"us", {UnitKind::kTime, 1e-6}},
      {"ns", {UnitKind::kTime, 1e-9}},
      {"ps", {UnitKind::kTime, 1e-12}},
  };
  return t;
}

const char* kind_name(UnitKind k) {
  switch (k) {
    case UnitKind::kFrequency:
      return "frequency";
    case UnitKind::kTemperature:
      return "temperature";
    case UnitKind::kTime:
      return "time";
    case UnitKind::kDimensionless:
      return "dimensionless";
  }
  return "?";
}

const UnitInfo& lookup(const std::string& unit, const std::string& path) {
  const auto it = table().find(unit);
  if (it == table().end()) throw ConfigError(path + ": unknown unit '" + unit + "'");
  return it->second;
}

}  // namespace

UnitKind unit_kind(const std::string& unit) { return lookup(unit, "unit").kind; }

double to_internal(const Quantity& q, UnitKind expected, const std::string& path) {
  const UnitInfo& u = lookup(q.unit, path);
  if (u.kind != expected)
    throw ConfigError(path + ": unit '" + q.unit + "' is not a " + kind_name(expected) + " unit");
  if (!std::isfinite(q.value)) throw ConfigError(path + ": value must be finite");
  return q.value * u.factor;
}

double from_internal(double value, const std::string& unit) {
  return value / lookup(unit, "unit").factor;
}

const std::vector<std::string>& unit_whitelist() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : table()) v.push_back(k);
    return v;
  }();
  return names;
}

}  // namespace sledsim::harness
