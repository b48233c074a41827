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

#include "json.hpp"

#include "sledsim/harness/config.hpp"
#include "sledsim/harness/output.hpp"

namespace sledsim::harness {

struct RunOptions {
  Profile profile = Profile::kFast;
  unsigned workers = 0;
};

/// Each command fills `out` and returns derived quantities for the manifest.
using Command = nlohmann::json (*)(const RunConfig&, const RunOptions&, OutputDir&);

nlohmann::json cmd_dynamics(const RunConfig& config, const RunOptions& options, OutputDir& out);
nlohmann::json cmd_steady(const RunConfig& config, const RunOptions& options, OutputDir& out);
nlohmann::json cmd_shift(const RunConfig& config, const RunOptions& options, OutputDir& out);
nlohmann::json cmd_pump_probe(const RunConfig& config, const RunOptions& options, OutputDir& out);
nlohmann::json cmd_noise_check(const RunConfig& config, const RunOptions& options, OutputDir& out);
nlohmann::json cmd_readout(const RunConfig& config, const RunOptions& options, OutputDir& out);

Command find_command(const std::string& name);
const std::vector<std::string>& command_names();

/// Runs a command and writes manifest.json. Returns the manifest.
nlohmann::json run_command(const std::string& name, const RunConfig& config,
                           const RunOptions& options, const std::filesystem::path& out_dir);

}  // namespace sledsim::harness
