// Copyright 2026 The regmarket Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// market_sim: runs named scenarios and parameter sweeps.
//
//   market_sim run <scenario> --config <path> --out <dir> [--seed N] [--jobs N]
//   market_sim sweep --config <path> --grid <spec> --out <dir> [--seeds N]
//
// Exit codes: 0 success, 1 runtime failure, 2 unknown scenario or usage
// error, 3 invalid config.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "regmarket/config_io.hpp"
#include "regmarket/experiments.hpp"

namespace {

int fail(int code, const std::string& msg) {
  std::cerr << "market_sim: " << msg << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regression data market simulator"};
  app.require_subcommand(1);

  std::string scenario, config_path, out_dir, grid_spec;
  std::uint64_t seed = 0;
  std::size_t jobs = 0, seeds = 10, sweep_seeds = 1;

  auto* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("scenario", scenario, "Scenario name")->required();
  run->add_option("--config", config_path, "Config JSON")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  auto* seed_opt = run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--jobs", jobs, "Worker threads (0: all cores)");
  run->add_option("--seeds", seeds, "Seeds for averaged scenarios");

  auto* sweep = app.add_subcommand("sweep", "Run a parameter grid");
  sweep->add_option("--config", config_path, "Config JSON")->required();
  sweep->add_option("--grid", grid_spec, "name=v1,v2;name2=v3")->required();
  sweep->add_option("--out", out_dir, "Output directory")->required();
  auto* sweep_seed_opt = sweep->add_option("--seed", seed, "Override the config seed");
  sweep->add_option("--jobs", jobs, "Worker threads (0: all cores)");
  sweep->add_option("--seeds", sweep_seeds, "Seeds per grid point");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  regmarket::MarketConfig cfg;
  try {
    cfg = regmarket::load_config(config_path);
  } catch (const regmarket::ConfigError& e) {
    return fail(3, std::string("invalid config: ") + e.what());
  } catch (const std::exception& e) {
    return fail(3, std::string("invalid config: ") + e.what());
  }

  regmarket::ScenarioOptions opts;
  opts.out_dir = out_dir;
  opts.jobs = jobs;
  try {
    regmarket::ScenarioResult res;
    if (run->parsed()) {
      if (*seed_opt) opts.seed = seed;
      opts.seeds = seeds;
      res = regmarket::run_scenario(scenario, cfg, opts);
    } else {
      if (*sweep_seed_opt) opts.seed = seed;
      opts.seeds = sweep_seeds;
      res = regmarket::run_sweep(cfg, regmarket::parse_grid(grid_spec), opts);
    }
    std::cout << res.summary << "\n";
  } catch (const regmarket::UnknownScenarioError& e) {
    return fail(2, e.what());
  } catch (const regmarket::ConfigError& e) {
    return fail(3, std::string("invalid config: ") + e.what());
  } catch (const std::exception& e) {
    return fail(1, e.what());
  }
  return 0;
}
