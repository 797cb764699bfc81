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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "regmarket/config_io.hpp"
#include "regmarket/experiments.hpp"

namespace regmarket {
namespace {

namespace fs = std::filesystem;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

class ScenarioTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("regmarket_" + std::string(::testing::UnitTest::GetInstance()
                                           ->current_test_info()
                                           ->name()));
    fs::remove_all(dir_);
    cfg_ = load_config(REGMARKET_SOURCE_DIR "/configs/baseline.json");
    cfg_.tau = 1000;
    opts_.out_dir = dir_.string();
    opts_.seeds = 2;
    opts_.jobs = 2;
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path dir_;
  MarketConfig cfg_;
  ScenarioOptions opts_;
};

TEST(Registry, KnowsEveryScenario) {
  const std::vector<std::string> expected = {
      "fig1_heatmap", "fig2_valuation",   "fig3_payments", "fig4_params",
      "fig5_losses",  "fig6_dynamic",     "fig7_convergence", "market_utility"};
  for (const auto& name : expected) {
    EXPECT_NE(std::find(scenario_names().begin(), scenario_names().end(), name),
              scenario_names().end())
        << name;
  }
  EXPECT_THROW(run_scenario("nope", MarketConfig{}, {}), UnknownScenarioError);
}

TEST(Grid, ParsesAxesInOrder) {
  const auto g = parse_grid("p_max=1,2.5; C=0.1");
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g[0].name, "p_max");
  EXPECT_EQ(g[0].values, (std::vector<double>{1.0, 2.5}));
  EXPECT_EQ(g[1].name, "C");
  EXPECT_TRUE(parse_grid("").empty());
}

TEST(Grid, RejectsMalformedSpecs) {
  EXPECT_THROW(parse_grid("p_max"), ConfigError);
  EXPECT_THROW(parse_grid("bogus=1"), ConfigError);
  EXPECT_THROW(parse_grid("p_max=1;p_max=2"), ConfigError);
  EXPECT_THROW(parse_grid("p_max=1,x"), ConfigError);
  EXPECT_THROW(parse_grid("p_max="), ConfigError);
}

TEST(Grid, AppliesParameters) {
  const MarketConfig base;
  EXPECT_DOUBLE_EQ(apply_parameter(base, "alpha", 0.7).alpha, 0.7);
  EXPECT_EQ(apply_parameter(base, "tau", 50).tau, 50u);
  EXPECT_THROW(apply_parameter(base, "tau", 2.5), ConfigError);
  EXPECT_EQ(apply_parameter(base, "C", 0.3).C, std::vector<double>(4, 0.3));
  const Matrix c = apply_parameter(base, "rho", 0.6).correlation();
  EXPECT_DOUBLE_EQ(c(2, 3), 0.6);
  EXPECT_DOUBLE_EQ(c(3, 2), 0.6);
  EXPECT_DOUBLE_EQ(c(0, 1), 0.0);
  EXPECT_THROW(apply_parameter(base, "nope", 1.0), ConfigError);
}

TEST(ParallelMap, KeepsIndexOrder) {
  const auto out = parallel_map(100, 8, [](std::size_t i) { return std::to_string(i * i); });
  for (std::size_t i = 0; i < 100; ++i) EXPECT_EQ(out[i], std::to_string(i * i));
}

TEST(ParallelMap, PropagatesFailures) {
  EXPECT_THROW(parallel_map(10, 4,
                            [](std::size_t i) -> std::string {
                              if (i == 7) throw std::runtime_error("boom");
                              return "";
                            }),
               std::runtime_error);
}

TEST_F(ScenarioTest, ValuationCurves) {
  const ScenarioResult r = run_scenario("fig2_valuation", cfg_, opts_);
  ASSERT_EQ(r.artifacts.size(), 1u);
  const auto rows = lines_of(slurp(r.artifacts[0]));
  EXPECT_EQ(rows[0], "eps,alpha,beta,valuation");
  EXPECT_EQ(rows.size(), 1u + 4u * 100u);
}

TEST_F(ScenarioTest, PaymentsCoverAllModes) {
  const ScenarioResult r = run_scenario("fig3_payments", cfg_, opts_);
  const std::string text = slurp(r.artifacts[0]);
  EXPECT_EQ(lines_of(text)[0], "mode,iter,agent,payment,normalized_payment");
  for (const char* m : {"algorithm1,", "case1,", "case2,"}) {
    EXPECT_NE(text.find(std::string("\n") + m), std::string::npos) << m;
  }
}

TEST_F(ScenarioTest, ParameterTrace) {
  const ScenarioResult r = run_scenario("fig4_params", cfg_, opts_);
  const auto rows = lines_of(slurp(r.artifacts[0]));
  EXPECT_EQ(rows[0], "t,theta0,theta1,theta2,theta3,theta4");
  EXPECT_EQ(rows.size(), 1u + cfg_.tau / 100);
}

TEST_F(ScenarioTest, LossCurves) {
  const ScenarioResult r = run_scenario("fig5_losses", cfg_, opts_);
  EXPECT_FALSE(lines_of(slurp(r.artifacts[0])).empty());
}

TEST_F(ScenarioTest, DynamicWritesPerModeTraces) {
  const ScenarioResult r = run_scenario("fig6_dynamic", cfg_, opts_);
  for (const char* m : {"algorithm1", "case1", "case2"}) {
    EXPECT_TRUE(fs::exists(dir_ / (std::string("fig6_") + m + ".csv"))) << m;
    EXPECT_TRUE(fs::exists(dir_ / (std::string("fig6_") + m + ".json"))) << m;
  }
  EXPECT_TRUE(fs::exists(dir_ / "fig6_dynamic.csv"));
}

TEST_F(ScenarioTest, ConvergenceTable) {
  const ScenarioResult r = run_scenario("fig7_convergence", cfg_, opts_);
  const auto rows = lines_of(slurp((dir_ / "fig7_convergence.csv").string()));
  EXPECT_EQ(rows[0], "rho,eps_ref,iterations");
  EXPECT_EQ(rows.size(), 1u + 3u * 6u);
  const auto runs = lines_of(slurp((dir_ / "fig7_convergence_runs.csv").string()));
  EXPECT_EQ(runs.size(), 1u + 3u * 6u * opts_.seeds);
}

TEST_F(ScenarioTest, UtilityTable) {
  run_scenario("market_utility", cfg_, opts_);
  const auto rows = lines_of(slurp((dir_ / "market_utility.csv").string()));
  EXPECT_EQ(rows[0], "eps_ref,mode,utility");
  EXPECT_GT(rows.size(), 3u);
}

TEST_F(ScenarioTest, ScenariosIgnoreThreadCount) {
  ScenarioOptions one = opts_;
  one.jobs = 1;
  one.out_dir = (dir_ / "one").string();
  ScenarioOptions many = opts_;
  many.jobs = 4;
  many.out_dir = (dir_ / "many").string();
  run_scenario("fig7_convergence", cfg_, one);
  run_scenario("fig7_convergence", cfg_, many);
  EXPECT_EQ(slurp(one.out_dir + "/fig7_convergence_runs.csv"),
            slurp(many.out_dir + "/fig7_convergence_runs.csv"));
}

TEST_F(ScenarioTest, SweepRowsAndDeterminism) {
  opts_.seeds = 2;
  const auto grid = parse_grid("p_max=1,2;C=0.5");
  const ScenarioResult a = run_sweep(cfg_, grid, opts_);
  const std::string first = slurp(a.artifacts[0]);
  const auto rows = lines_of(first);
  EXPECT_EQ(rows[0], "p_max,C,seed,iterations,stop_reason,eps_asked,price,utility");
  EXPECT_EQ(rows.size(), 1u + 2u * 2u);
  EXPECT_EQ(rows[1].substr(0, 6), "1,0.5,");
  opts_.jobs = 1;
  run_sweep(cfg_, grid, opts_);
  EXPECT_EQ(slurp(a.artifacts[0]), first);
}

TEST(Summary, MatchesFinalRecord) {
  MarketConfig cfg = load_config(REGMARKET_SOURCE_DIR "/configs/baseline.json");
  cfg.tau = 1000;
  const RunSummary s = summarize_run(cfg, MarketMode::kAlgorithm1);
  const MarketTrace t = run_algorithm1(cfg);
  EXPECT_EQ(s.iterations, t.iterations.size());
  EXPECT_EQ(s.stop, t.stop_reason);
  EXPECT_DOUBLE_EQ(s.eps_asked, t.final_record().state.eps_asked);
  EXPECT_DOUBLE_EQ(s.price, t.final_record().state.price_offered);
}

}  // namespace
}  // namespace regmarket
