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

// sledsim command-line harness: one subcommand per experiment, results and
// manifest.json written into --out.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "sledsim/errors.hpp"
#include "sledsim/harness/commands.hpp"
#include "sledsim/harness/config.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace sledsim;
  using namespace sledsim::harness;

  CLI::App app{"Driven dissipative qubit simulations (LME, LME without shift, SLED)"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  std::string profile = "fast";
  std::optional<std::uint64_t> seed;
  unsigned workers = 0;
  app.add_option("--config", config_path, "JSON config; built-in defaults when omitted")
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory")->required();
  app.add_option("--profile", profile, "fast or paper")->check(CLI::IsMember({"fast", "paper"}));
  app.add_option("--seed", seed, "Base seed (overrides plan.base_seed)");
  app.add_option("--workers", workers, "Worker threads (0 = all cores)");
  for (const auto& name : command_names()) app.add_subcommand(name, "Run the " + name + " experiment");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    RunConfig config = config_path.empty() ? default_config() : load_config(config_path);
    if (seed) config.base_seed = *seed;
    const RunOptions options{parse_profile(profile), workers};
    const std::string name = app.get_subcommands().front()->get_name();
    const auto manifest = run_command(name, config, options, out_dir);
    std::cout << name << ": " << manifest["files"].size() << " files in " << out_dir << " ("
              << manifest["wall_clock_s"].get<double>() << " s)\n";
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}
