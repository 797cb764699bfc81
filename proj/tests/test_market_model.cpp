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

#include <cmath>

#include "regmarket/market_model.hpp"

namespace regmarket {
namespace {

MarketConfig setup_config() {
  MarketConfig cfg;
  cfg.alpha = 0.45;
  cfg.beta = -0.4;
  cfg.theta_true = {0.2, 0.4, -0.3, -0.6, 0.2};
  cfg.noise_var = 0.3;
  cfg.tau = 10000;
  return cfg;
}

std::string error_of(const MarketConfig& cfg) {
  try {
    validate_config(cfg);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(ValidateConfig, AcceptsExperimentSetup) {
  EXPECT_NO_THROW(validate_config(setup_config()));
}

TEST(ValidateConfig, RejectsBetaAtZero) {
  MarketConfig cfg = setup_config();
  cfg.beta = 0.0;
  EXPECT_EQ(error_of(cfg), "beta must lie strictly in (−1,0)");
  cfg.beta = -1.0;
  EXPECT_EQ(error_of(cfg), "beta must lie strictly in (−1,0)");
}

TEST(ValidateConfig, RejectsCorrelationAboveOne) {
  MarketConfig cfg = setup_config();
  cfg.corr = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 1.2}, {0, 0, 1.2, 1}};
  EXPECT_EQ(error_of(cfg), "correlation outside [−1,1]");
}

TEST(ValidateConfig, RejectsIndefiniteCorrelation) {
  MarketConfig cfg = setup_config();
  cfg.corr = {{1, 0.9, 0.9, 0}, {0.9, 1, -0.9, 0}, {0.9, -0.9, 1, 0}, {0, 0, 0, 1}};
  EXPECT_EQ(error_of(cfg), "corr must be positive semidefinite");
}

TEST(ValidateConfig, AcceptsPerfectCorrelation) {
  MarketConfig cfg = setup_config();
  cfg.corr = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 1}, {0, 0, 1, 1}};
  EXPECT_NO_THROW(validate_config(cfg));
}

TEST(ValidateConfig, ChecksPerAgentLengths) {
  MarketConfig cfg = setup_config();
  cfg.C = {1.0, 1.0};
  EXPECT_NE(error_of(cfg).find("C"), std::string::npos);
}

TEST(ValidateConfig, ChecksDepartures) {
  MarketConfig cfg = setup_config();
  cfg.departures = {{0, 2}};
  EXPECT_FALSE(error_of(cfg).empty());
  cfg.departures = {{3, 0}};
  EXPECT_FALSE(error_of(cfg).empty());
  cfg.departures = {{3, 2}, {3, 4}};
  EXPECT_FALSE(error_of(cfg).empty());
  cfg.departures = {{3, 2}};
  EXPECT_NO_THROW(validate_config(cfg));
}

TEST(ValidateConfig, MultiFeatureOwnership) {
  MarketConfig cfg = setup_config();
  cfg.n_agents = 3;
  EXPECT_FALSE(error_of(cfg).empty());
  cfg.feature_owner = {0, 1, 2, 2};
  EXPECT_NO_THROW(validate_config(cfg));
  EXPECT_EQ(cfg.features_of(2), (std::vector<std::size_t>{2, 3}));
  cfg.feature_owner = {0, 1, 2, 5};
  EXPECT_FALSE(error_of(cfg).empty());
}

TEST(ValidateConfig, Idempotent) {
  MarketConfig cfg = setup_config();
  cfg.psi = {1, 2, 3, 4};
  cfg.departures = {{2, 5}};
  const MarketConfig once = validate_config(cfg);
  EXPECT_EQ(validate_config(once), once);
  EXPECT_EQ(once, cfg);
}

TEST(MarketConfig, DefaultsResolve) {
  const MarketConfig cfg = default_config();
  EXPECT_EQ(cfg.num_features(), 4u);
  EXPECT_EQ(cfg.num_supporting(), 3u);
  EXPECT_DOUBLE_EQ(cfg.eps_u, std::log(60.0));
  EXPECT_DOUBLE_EQ(cfg.eps_ref, std::log(10.0));
  EXPECT_DOUBLE_EQ(cfg.psi_of(2), 1.0);
  EXPECT_DOUBLE_EQ(cfg.cost_of(3), 1.0);
  EXPECT_EQ(cfg.owner_of(0), 0u);
  EXPECT_EQ(cfg.owner_of(3), 3u);
  EXPECT_TRUE(cfg.correlation().isIdentity());
}

}  // namespace
}  // namespace regmarket
