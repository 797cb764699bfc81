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

// Shapley contributions of supporting agents to the learner's regression.
//
// Players are identified by position in a player list; a coalition is a
// bitmask over those positions.

#ifndef REGMARKET_VALUATION_HPP_
#define REGMARKET_VALUATION_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <vector>

#include "regmarket/market_model.hpp"
#include "regmarket/regression.hpp"
#include "regmarket/rng.hpp"

namespace regmarket {

using Coalition = std::uint32_t;
using CoalitionValue = std::function<double(Coalition)>;

inline constexpr std::size_t kMaxExactPlayers = 12;
inline constexpr double kScoreFloor = 1e-12;

struct ContributionReport {
  std::vector<std::size_t> agents;
  std::vector<double> shapley;
  std::vector<double> normalized;
  // Monte Carlo only; zeros for the exact computation.
  std::vector<double> std_error;
  std::map<Coalition, double> coalition_scores;
};

// Shapley value of each of n players via the coalition-weighted sum over all
// 2^n coalitions. Throws std::invalid_argument above kMaxExactPlayers.
ContributionReport shapley_exact(std::size_t n, const CoalitionValue& value);

// Permutation sampling; deterministic for a given rng state.
ContributionReport shapley_mc(std::size_t n, const CoalitionValue& value,
                              std::size_t n_perms, Rng& rng);

// Clamps at 0 and rescales to sum 1; all zeros when nothing is positive.
std::vector<double> normalize_contributions(const std::vector<double>& shapley);

// Coalition score V(S) for a fixed data set: normalized loss reduction of
// central ∪ S relative to central ∪ all players, clamped to [0, 1].
class CoalitionScorer {
 public:
  CoalitionScorer(GramLoss gram, FeatureSet central,
                  std::vector<FeatureSet> player_features);
  // Uses every supporting agent that owns a panel column as a player.
  static CoalitionScorer for_panel(const FeaturePanel& panel,
                                   const std::vector<std::size_t>& agents);

  std::size_t num_players() const { return players_.size(); }
  double loss(Coalition s) const;
  double score(Coalition s) const;
  double loss_central() const { return loss_central_; }
  double loss_all() const { return loss_all_; }
  const GramLoss& gram() const { return gram_; }
  FeatureSet features(Coalition s) const;
  CoalitionValue as_value() const;

 private:
  GramLoss gram_;
  FeatureSet central_;
  std::vector<FeatureSet> players_;
  double loss_central_;
  double loss_all_;
  mutable std::map<Coalition, double> cache_;
};

// V(S) with the learner (agent 0) as central and all panel owners besides it
// as the reference coalition. coalition lists agent ids.
double coalition_score(const FeaturePanel& panel,
                       const std::vector<std::size_t>& coalition);

ContributionReport shapley_exact(const FeaturePanel& panel,
                                 const std::vector<std::size_t>& agents);
ContributionReport shapley_mc(const FeaturePanel& panel,
                              const std::vector<std::size_t>& agents,
                              std::size_t n_perms, Rng& rng);

struct DistortionGrid {
  std::vector<double> rho;
  std::vector<double> sigma;
  std::vector<std::size_t> agents;
  // value[r][s][a]: normalized contribution averaged over seeds.
  std::vector<std::vector<std::vector<double>>> value;
};

struct DistortionOptions {
  std::size_t correlated_a = 2;  // feature index of the first correlated pair
  std::size_t correlated_b = 3;  // feature index of the second; also noisy
  std::size_t noisy_agent = 3;
  std::vector<double> rho = {0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1};
  std::vector<double> sigma = {0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1};
  std::size_t seeds = 1;
  // Privacy factor applied to every supporting agent; <= 0 disables LDP.
  double ldp_epsilon = 0.0;
};

// Regenerates the panel for each (rho, sigma) cell and seed, adds the extra
// noise to the noisy agent before any LDP perturbation, and averages the
// normalized Shapley values of the supporting agents.
DistortionGrid contributions_under_distortion(const MarketConfig& cfg,
                                              const DistortionOptions& opts);

// CSV: rho,sigma,agent,normalized_contribution (agents numbered from 1).
void write_heatmap_csv(const DistortionGrid& grid, std::ostream& out);

}  // namespace regmarket

#endif  // REGMARKET_VALUATION_HPP_
