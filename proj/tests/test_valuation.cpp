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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "regmarket/datagen.hpp"
#include "regmarket/valuation.hpp"

namespace regmarket {
namespace {

// Average marginal contribution over every ordering of the players.
std::vector<double> permutation_oracle(std::size_t n, const CoalitionValue& v) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> phi(n, 0.0);
  double count = 0.0;
  do {
    Coalition s = 0;
    for (std::size_t i : order) {
      const Coalition t = s | (1u << i);
      phi[i] += v(t) - v(s);
      s = t;
    }
    count += 1.0;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& x : phi) x /= count;
  return phi;
}

CoalitionValue random_game(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto table = std::make_shared<std::vector<double>>(1u << n);
  (*table)[0] = 0.0;
  for (std::size_t s = 1; s < table->size(); ++s) (*table)[s] = u(rng);
  return [table](Coalition s) { return (*table)[s]; };
}

TEST(ShapleyExact, AxiomsOnRandomGames) {
  std::mt19937_64 rng(42);
  for (int inst = 0; inst < 50; ++inst) {
    const std::size_t n = 3 + inst % 3;
    CoalitionValue base = random_game(n, rng);
    // Player 0 is made null and players 1, 2 symmetric.
    auto strip = [](Coalition s) { return s & ~1u; };
    auto swap12 = [](Coalition s) {
      const bool a = s & 2u, b = s & 4u;
      Coalition t = s & ~6u;
      if (a) t |= 4u;
      if (b) t |= 2u;
      return t;
    };
    CoalitionValue v = [&, base](Coalition s) {
      const Coalition t = strip(s);
      return 0.5 * (base(t) + base(swap12(t)));
    };
    const ContributionReport rep = shapley_exact(n, v);
    const auto oracle = permutation_oracle(n, v);
    const Coalition grand = (1u << n) - 1;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(rep.shapley[i], oracle[i], 1e-9);
      total += rep.shapley[i];
    }
    EXPECT_NEAR(total, v(grand) - v(0), 1e-9);
    EXPECT_NEAR(rep.shapley[0], 0.0, 1e-9);
    EXPECT_NEAR(rep.shapley[1], rep.shapley[2], 1e-9);
  }
}

TEST(ShapleyExact, DummyPlayerGetsItsStandaloneValue) {
  // v(S) = w(S without 0) + 0.7 [0 in S]
  std::mt19937_64 rng(3);
  CoalitionValue w = random_game(4, rng);
  CoalitionValue v = [w](Coalition s) { return w(s & ~1u) + ((s & 1u) ? 0.7 : 0.0); };
  EXPECT_NEAR(shapley_exact(4, v).shapley[0], 0.7, 1e-12);
}

TEST(ShapleyExact, RejectsTooManyPlayers) {
  EXPECT_THROW(shapley_exact(kMaxExactPlayers + 1, [](Coalition) { return 0.0; }),
               std::invalid_argument);
}

MarketConfig setup_config() {
  MarketConfig cfg;
  cfg.theta_true = {0.2, 0.4, -0.3, -0.6, 0.2};
  return cfg;
}

TEST(CoalitionScore, Anchors) {
  const FeaturePanel p = generate_panel(setup_config());
  EXPECT_DOUBLE_EQ(coalition_score(p, {}), 0.0);
  EXPECT_DOUBLE_EQ(coalition_score(p, {1, 2, 3}), 1.0);
  const double s = coalition_score(p, {2});
  EXPECT_GT(s, 0.0);
  EXPECT_LT(s, 1.0);
}

TEST(ShapleyPanel, MatchesPermutationOracle) {
  const FeaturePanel p = generate_panel(setup_config());
  const CoalitionScorer scorer = CoalitionScorer::for_panel(p, {1, 2, 3});
  const ContributionReport rep = shapley_exact(p, {1, 2, 3});
  const auto oracle = permutation_oracle(3, [&](Coalition s) { return scorer.score(s); });
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(rep.shapley[i], oracle[i], 1e-12);
  EXPECT_NEAR(std::accumulate(rep.normalized.begin(), rep.normalized.end(), 0.0), 1.0,
              1e-12);
  EXPECT_EQ(rep.coalition_scores.size(), 8u);
}

TEST(ShapleyPanel, IdenticalColumnsAreSymmetric) {
  MarketConfig cfg = setup_config();
  cfg.theta_true = {0.2, 0.4, -0.3, 0.5, 0.5};
  cfg.corr = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 1}, {0, 0, 1, 1}};
  const ContributionReport rep = shapley_exact(generate_panel(cfg), {1, 2, 3});
  EXPECT_NEAR(rep.shapley[1], rep.shapley[2], 1e-9);
}

TEST(ShapleyPanel, NullFeatureGetsZero) {
  MarketConfig cfg = setup_config();
  cfg.theta_true = {0.2, 0.4, -0.3, 0.0, 0.2};
  cfg.noise_var = 0.0;
  const ContributionReport rep = shapley_exact(generate_panel(cfg), {1, 2, 3});
  // A zero-coefficient column still fits O(1/tau) of the residual by chance.
  EXPECT_NEAR(rep.shapley[1], 0.0, 1e-4);
  EXPECT_LT(std::abs(rep.shapley[1]), 1e-3 * rep.shapley[0]);
}

TEST(ShapleyMc, WithinThreeStandardErrors) {
  const FeaturePanel p = generate_panel(setup_config());
  Rng rng = make_rng(1, Stream::kShapley);
  const ContributionReport mc = shapley_mc(p, {1, 2, 3}, 10000, rng);
  const ContributionReport ex = shapley_exact(p, {1, 2, 3});
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_LE(std::abs(mc.shapley[i] - ex.shapley[i]), 3.0 * mc.std_error[i] + 1e-12);
  }
}

TEST(ShapleyMc, SinglePermutationIsOneMarginal) {
  const FeaturePanel p = generate_panel(setup_config());
  const CoalitionScorer scorer = CoalitionScorer::for_panel(p, {1, 2, 3});
  Rng rng = make_rng(2, Stream::kShapley);
  const ContributionReport mc = shapley_mc(p, {1, 2, 3}, 1, rng);
  for (std::size_t i = 0; i < 3; ++i) {
    bool found = false;
    for (Coalition s = 0; s < 8; ++s) {
      if (s & (1u << i)) continue;
      const double d = scorer.score(s | (1u << i)) - scorer.score(s);
      found = found || std::abs(d - mc.shapley[i]) < 1e-14;
    }
    EXPECT_TRUE(found) << i;
  }
}

TEST(ShapleyMc, DeterministicForSeed) {
  const FeaturePanel p = generate_panel(setup_config());
  Rng a = make_rng(9, Stream::kShapley), b = make_rng(9, Stream::kShapley);
  EXPECT_EQ(shapley_mc(p, {1, 2, 3}, 50, a).shapley,
            shapley_mc(p, {1, 2, 3}, 50, b).shapley);
}

TEST(Normalize, ClampsAndRescales) {
  EXPECT_EQ(normalize_contributions({0.5, -0.2, 1.5}),
            (std::vector<double>{0.25, 0.0, 0.75}));
  EXPECT_EQ(normalize_contributions({-1.0, 0.0}), (std::vector<double>{0.0, 0.0}));
}

MarketConfig distortion_config() {
  MarketConfig cfg;
  cfg.theta_true = {0.2, 0.4, 0.3, -0.4, 0.5};
  return cfg;
}

DistortionOptions small_grid() {
  DistortionOptions d;
  d.rho = {0.0, 1.0};
  d.sigma = {0.0, 1.0};
  d.seeds = 3;
  return d;
}

TEST(Distortion, NoiseLowersOwnShare) {
  const DistortionGrid g = contributions_under_distortion(distortion_config(), small_grid());
  EXPECT_GT(g.value[0][0][2], g.value[0][1][2]);
}

TEST(Distortion, SecondAgentDominatesWhenPairIsRedundantAndNoisy) {
  const DistortionGrid g = contributions_under_distortion(distortion_config(), small_grid());
  const auto& cell = g.value[1][1];
  EXPECT_GT(cell[0], cell[1]);
  EXPECT_GT(cell[0], cell[2]);
}

TEST(Distortion, SymmetricPairIsSymmetric) {
  MarketConfig cfg = setup_config();
  cfg.theta_true = {0.2, 0.4, -0.3, 0.5, 0.5};
  DistortionOptions d;
  d.rho = {1.0};
  d.sigma = {0.0};
  const DistortionGrid g = contributions_under_distortion(cfg, d);
  EXPECT_NEAR(g.value[0][0][1], g.value[0][0][2], 1e-9);
}

TEST(Distortion, OwnNoiseDegradesEachAgent) {
  const MarketConfig cfg = distortion_config();
  for (std::size_t agent = 1; agent <= 3; ++agent) {
    int decreasing = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
      MarketConfig c = cfg;
      c.seed = 100 + s;
      DistortionOptions d;
      d.rho = {0.0};
      d.sigma = {0.0, 0.5, 1.0};
      d.noisy_agent = agent;
      const DistortionGrid g = contributions_under_distortion(c, d);
      const std::size_t i = agent - 1;
      decreasing += g.value[0][0][i] >= g.value[0][1][i] &&
                    g.value[0][1][i] >= g.value[0][2][i];
    }
    // One-sided sign test at 20 trials: 15 or more successes gives p < 0.05.
    EXPECT_GE(decreasing, 15) << "agent " << agent;
  }
}

}  // namespace
}  // namespace regmarket
