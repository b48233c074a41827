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

#include <string>
#include <vector>

namespace sledsim::harness {

enum class UnitKind { kFrequency, kTemperature, kTime, kDimensionless };

/// A config quantity as written: {"value": v, "unit": u}.
struct Quantity {
  double value = 0.0;
  std::string unit;
};

/// Kind of a whitelisted unit; ConfigError for anything else.
UnitKind unit_kind(const std::string& unit);

/// Internal value (rad/s, K, s, or plain number). ConfigError when the unit
/// is unknown or of the wrong kind; `path` names the field in messages.
double to_internal(const Quantity& q, UnitKind expected, const std::string& path);

/// Inverse of to_internal for the given unit.
double from_internal(double value, const std::string& unit);

const std::vector<std::string>& unit_whitelist();

}  // namespace sledsim::harness
