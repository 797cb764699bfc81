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

// Shared domain types for the regression data market and the scenario
// configuration schema.
//
// Agent indexing: agent 0 is the central agent (the learner). Agents
// 1..n_agents-1 are supporting agents that sell features. Per-agent vectors
// (psi, phi, C, extra_noise_std) are indexed the same way and have length
// n_agents; the entry for agent 0 is carried but unused by the pricing code.

#ifndef REGMARKET_MARKET_MODEL_HPP_
#define REGMARKET_MARKET_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace regmarket {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Thrown by validate_config and the JSON reader.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Form of the learner's valuation U(eps).
enum class ValuationForm {
  kLog,    // -beta * ln(alpha*eps*p + 1)
  kPower,  // (ln(alpha*eps*p + 1))^(-beta)
};

// Form of the performance improvement L.
enum class PerformanceForm {
  kReciprocal,  // 1 / max(delta, |gap|)
  kGap,         // |gap| / loss(central-only)
};

// A supporting agent that disconnects from the market at the start of the
// given outer iteration (1-based).
struct Departure {
  std::size_t agent = 0;
  std::size_t iteration = 0;
  bool operator==(const Departure&) const = default;
};

struct MarketConfig {
  std::size_t n_agents = 4;
  std::size_t tau = 10000;
  std::vector<double> theta_true = {0.2, 0.4, -0.3, -0.6, 0.2};
  double noise_var = 0.3;
  std::vector<std::vector<double>> corr;  // K x K; empty means identity
  double alpha = 0.45;
  double beta = -0.4;
  double gamma = 1.0;
  std::vector<double> psi;  // empty means all ones
  std::vector<double> phi;  // empty means all ones
  std::vector<double> C;    // empty means all ones
  double eps_l = 0.1;
  double eps_u = 4.0943445622221004;  // ln 60
  double eps_ref = 2.302585092994046;  // ln 10
  double zeta_ref = 0.9;
  double p_max = 1.0;
  std::uint64_t seed = 1;

  // Extensions beyond the core schema. All have neutral defaults.
  std::vector<std::size_t> feature_owner;  // empty: feature k -> agent k
  std::vector<double> extra_noise_std;     // per agent, empty means zeros
  double clip_bound = 3.0;
  bool leakage_correlation = false;
  ValuationForm valuation_form = ValuationForm::kLog;
  PerformanceForm performance_form = PerformanceForm::kReciprocal;
  std::size_t max_iterations = 200;
  std::size_t shapley_permutations = 0;  // 0: exact Shapley
  std::vector<Departure> departures;

  std::size_t num_features() const {
    return theta_true.empty() ? 0 : theta_true.size() - 1;
  }
  std::size_t num_supporting() const {
    return n_agents == 0 ? 0 : n_agents - 1;
  }

  // Resolved accessors that apply the defaults described above.
  Matrix correlation() const;
  double psi_of(std::size_t agent) const;
  double phi_of(std::size_t agent) const;
  double cost_of(std::size_t agent) const;
  double extra_noise_of(std::size_t agent) const;
  std::size_t owner_of(std::size_t feature) const;
  std::vector<std::size_t> features_of(std::size_t agent) const;

  bool operator==(const MarketConfig&) const = default;
};

struct FeaturePanel {
  Matrix x;  // tau x K
  Vector y;  // tau
  std::vector<std::size_t> ownership;  // feature index -> agent index

  std::size_t tau() const { return static_cast<std::size_t>(x.rows()); }
  std::size_t num_features() const { return static_cast<std::size_t>(x.cols()); }
  std::vector<std::size_t> features_of(std::size_t agent) const;
};

struct AgentProfile {
  std::size_t id = 0;
  double eps_type = 0.0;
  double q = 0.0;
  std::vector<std::size_t> features;
  double extra_noise_std = 0.0;
};

struct EquilibriumState {
  std::vector<double> q_star;
  std::vector<double> eps_response;
  double eps_asked = 0.0;
  double price_offered = 0.0;
  std::vector<double> allocation;
  std::vector<double> contributions;
  double performance = 0.0;
  bool performance_degenerate = false;
  bool meets_reference = false;
  // Quantity multiplying the price in the central utility.
  double payment_weight = 0.0;
  // What the learner anticipates when pricing: W(p) = unearned_weight plus
  // the equilibrium q of the counted agents at allocations p * share, with
  // followers in the game given by `eligible`.
  bool anticipated = false;
  double unearned_weight = 0.0;
  std::vector<bool> eligible;
  std::vector<bool> counted;
  double price_floor = 0.0;
};

struct IterationRecord {
  std::size_t iteration = 0;
  std::vector<std::size_t> active;
  EquilibriumState state;
  double central_utility = 0.0;
  // Realized utility per agent; excluded agents are reported as
  // non-participants with utility 0 and excluded = true.
  std::vector<double> agent_utility;
  std::vector<bool> agent_excluded;
  double loss_central = 0.0;
  double loss_traded = 0.0;
  double loss_all = 0.0;
};

enum class StopReason { kEmptyActiveSet, kConverged, kIterationLimit };

struct MarketTrace {
  std::vector<IterationRecord> iterations;
  std::vector<double> eps_types;
  StopReason stop_reason = StopReason::kIterationLimit;

  std::size_t iterations_to_convergence() const { return iterations.size(); }
  const IterationRecord& final_record() const { return iterations.back(); }
};

const char* to_string(StopReason reason);
const char* to_string(ValuationForm form);
const char* to_string(PerformanceForm form);

// Returns cfg unchanged or throws ConfigError naming the first violated
// invariant.
MarketConfig validate_config(const MarketConfig& cfg);

// Default market: the learner plus three supporting agents, one scalar
// feature each, the learner owning feature 0.
MarketConfig default_config();

}  // namespace regmarket

#endif  // REGMARKET_MARKET_MODEL_HPP_
