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

// Scenario runner: each named scenario turns a config into CSV/JSON
// artifacts in an output directory, plus a one-line summary.

#ifndef REGMARKET_EXPERIMENTS_HPP_
#define REGMARKET_EXPERIMENTS_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "regmarket/market_model.hpp"
#include "regmarket/mechanism.hpp"

namespace regmarket {

class UnknownScenarioError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ScenarioOptions {
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;  // overrides cfg.seed
  std::size_t seeds = 10;             // for scenarios that average over seeds
  std::size_t jobs = 0;               // 0: hardware concurrency
};

struct ScenarioResult {
  std::string summary;
  std::vector<std::string> artifacts;  // paths, in write order
};

const std::vector<std::string>& scenario_names();

ScenarioResult run_scenario(const std::string& name, const MarketConfig& cfg,
                            const ScenarioOptions& opts);

// Runs fn(0..count-1) on up to jobs threads. Results come back in index
// order whatever the scheduling.
std::vector<std::string> parallel_map(
    std::size_t count, std::size_t jobs,
    const std::function<std::string(std::size_t)>& fn);

// Sets the correlation between features a and b; other entries keep their
// configured values.
MarketConfig with_pair_correlation(MarketConfig cfg, std::size_t a,
                                   std::size_t b, double rho);

struct GridAxis {
  std::string name;
  std::vector<double> values;
};

// "name=v1,v2;name2=v3". An empty spec is an empty grid. Throws ConfigError
// on malformed input or an unknown parameter name.
std::vector<GridAxis> parse_grid(const std::string& spec);

const std::vector<std::string>& sweep_parameters();
MarketConfig apply_parameter(MarketConfig cfg, const std::string& name,
                             double value);

// Cartesian product (first axis slowest) times seeds, Algorithm 1 at each
// point. Writes sweep.csv with one row per (grid point, seed).
ScenarioResult run_sweep(const MarketConfig& cfg,
                         const std::vector<GridAxis>& grid,
                         const ScenarioOptions& opts);

// Per-seed market run summary used by the convergence and utility
// scenarios.
struct RunSummary {
  std::size_t iterations = 0;
  StopReason stop = StopReason::kIterationLimit;
  double utility = 0.0;
  double eps_asked = 0.0;
  double price = 0.0;
};
RunSummary summarize_run(const MarketConfig& cfg, MarketMode mode);

}  // namespace regmarket

#endif  // REGMARKET_EXPERIMENTS_HPP_
