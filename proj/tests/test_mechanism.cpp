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
#include <sstream>

#include "regmarket/config_io.hpp"
#include "regmarket/mechanism.hpp"

namespace regmarket {
namespace {

MarketConfig baseline() {
  MarketConfig cfg = load_config(REGMARKET_SOURCE_DIR "/configs/baseline.json");
  cfg.tau = 2000;
  return cfg;
}

TEST(LearnerValuation, HandValues) {
  EXPECT_NEAR(learner_valuation(1.0, 1.0, 0.3, -0.2), 0.0524729, 1e-7);
  EXPECT_NEAR(learner_valuation(9.9, 1.0, 0.8, -0.8), 1.7506368, 1e-7);
  EXPECT_NEAR(learner_valuation(1.0, 1.0, 0.3, -2.0, ValuationForm::kPower),
              std::pow(std::log(1.3), 2.0), 1e-12);
}

TEST(CentralUtility, EdgeCases) {
  const UtilityParams u;
  EXPECT_DOUBLE_EQ(central_utility(0.5, 0.0, 3.0, 2.0, u), -1.0);
  EXPECT_DOUBLE_EQ(central_utility(0.5, 0.05, 3.0, 2.0, u), 0.0);
  EXPECT_DOUBLE_EQ(central_utility(0.5, 5.0, 3.0, 2.0, u), 0.0);
  EXPECT_NEAR(central_utility(0.5, 1.0, 3.0, 2.0, u),
              3.0 * 0.4 * std::log1p(0.45 * 0.5) - 1.0, 1e-12);
}

TEST(Performance, ReciprocalAndGapForms) {
  PerformanceReport r = performance_improvement(3.0, 1.0, 0.9);
  EXPECT_DOUBLE_EQ(r.value, 0.5);
  EXPECT_DOUBLE_EQ(r.gap, 2.0);
  EXPECT_FALSE(r.meets_reference);
  r = performance_improvement(1.0, 1.0, 0.9);
  EXPECT_TRUE(r.degenerate);
  EXPECT_DOUBLE_EQ(r.value, 1.0 / kPerformanceFloor);
  r = performance_improvement(4.0, 1.0, 0.5, PerformanceForm::kGap);
  EXPECT_DOUBLE_EQ(r.value, 0.75);
  EXPECT_TRUE(r.meets_reference);
}

TEST(Allocation, ProportionalToPositiveContributions) {
  EXPECT_EQ(allocate_prices(2.0, {1.0, -1.0, 3.0}),
            (std::vector<double>{0.5, 0.0, 1.5}));
  EXPECT_EQ(allocate_prices(2.0, {0.0, -1.0}), (std::vector<double>{0.0, 0.0}));
}

TEST(AskedEpsilon, MaxWithReference) {
  EXPECT_DOUBLE_EQ(asked_epsilon_update({0.5, 3.0, 1.0}, 1.0), 3.0);
  EXPECT_DOUBLE_EQ(asked_epsilon_update({0.5}, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(asked_epsilon_update({}, 1.0), 1.0);
}

PriceProblem concave_problem() {
  PriceProblem pr;
  pr.performance = 10.0;
  pr.eps = 1.0;
  pr.payment_weight = 1.0;
  pr.p_max = 2.0;
  return pr;
}

TEST(OptimizePrice, InteriorOptimum) {
  // d/dp [4 ln(1 + 0.45 p) - p] = 0 at p = (1.8 - 1) / 0.45.
  const PriceSolution s = optimize_price(concave_problem());
  EXPECT_NEAR(s.price, 0.8 / 0.45, 1e-5);
  EXPECT_FALSE(s.empty_bracket);
}

TEST(OptimizePrice, MonotoneUtilityPicksCap) {
  PriceProblem pr = concave_problem();
  pr.payment_weight = 0.0;
  EXPECT_DOUBLE_EQ(optimize_price(pr).price, 2.0);
}

TEST(OptimizePrice, EmptyBracketOffersCap) {
  PriceProblem pr = concave_problem();
  pr.p_floor = 2.0;
  const PriceSolution s = optimize_price(pr);
  EXPECT_TRUE(s.empty_bracket);
  EXPECT_DOUBLE_EQ(s.price, 2.0);
}

TEST(OptimizePrice, RespectsFloor) {
  PriceProblem pr = concave_problem();
  pr.p_floor = 1.9;
  const PriceSolution s = optimize_price(pr);
  EXPECT_GT(s.price, 1.9);
}

TEST(OptimizePrice, AnticipatedStepWeight) {
  PriceProblem pr = concave_problem();
  pr.weight_at = [](double p) { return p < 1.0 ? 0.0 : 3.0; };
  const PriceSolution s = optimize_price(pr);
  EXPECT_LT(s.price, 1.0);
  EXPECT_GT(s.price, 0.99);
}

TEST(RunMarket, LearnerAloneStopsAtOnce) {
  MarketConfig cfg;
  cfg.n_agents = 1;
  cfg.theta_true = {0.2, 0.4};
  const MarketTrace t = run_algorithm1(cfg);
  EXPECT_EQ(t.iterations.size(), 1u);
  EXPECT_EQ(t.stop_reason, StopReason::kEmptyActiveSet);
}

TEST(RunMarket, DeterministicForSeed) {
  const MarketConfig cfg = baseline();
  for (MarketMode m : {MarketMode::kAlgorithm1, MarketMode::kCaseI, MarketMode::kCaseII}) {
    EXPECT_EQ(trace_to_json(run_market(cfg, m), cfg, m).dump(),
              trace_to_json(run_market(cfg, m), cfg, m).dump());
  }
}

TEST(RunMarket, BudgetAndReferenceHold) {
  MarketConfig cfg = baseline();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    cfg.seed = seed;
    for (MarketMode m : {MarketMode::kAlgorithm1, MarketMode::kCaseI, MarketMode::kCaseII}) {
      const MarketTrace t = run_market(cfg, m);
      for (const auto& r : t.iterations) {
        double paid = 0.0;
        for (double a : r.state.allocation) {
          EXPECT_GE(a, 0.0);
          paid += a;
        }
        EXPECT_LE(paid, cfg.p_max + 1e-12);
        EXPECT_GE(r.state.eps_asked, cfg.eps_ref);
        EXPECT_LE(r.state.eps_asked, cfg.eps_u);
        for (double q : r.state.q_star) {
          EXPECT_GE(q, 0.0);
          EXPECT_LE(q, 1.0);
        }
      }
    }
  }
}

TEST(RunMarket, CaseTwoMatchesAlgorithmOneWhenNobodyLeaves) {
  MarketConfig cfg = baseline();
  cfg.p_max = 10.0;
  cfg.C.assign(4, 0.1);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    cfg.seed = seed;
    const MarketTrace a = run_market(cfg, MarketMode::kAlgorithm1);
    const MarketTrace b = run_market(cfg, MarketMode::kCaseII);
    for (const auto& r : a.iterations) {
      for (std::size_t i = 1; i < r.state.q_star.size(); ++i) {
        ASSERT_GE(r.state.q_star[i], kMinParticipation);
      }
    }
    EXPECT_EQ(trace_to_json(a, cfg, MarketMode::kAlgorithm1)["iterations"],
              trace_to_json(b, cfg, MarketMode::kCaseII)["iterations"]);
  }
}

TEST(RunMarket, DepartedAgentIsDroppedOrStillPaid) {
  MarketConfig cfg = baseline();
  cfg.p_max = 10.0;
  cfg.C.assign(4, 0.1);
  cfg.departures = {{3, 2}};
  const MarketTrace a = run_market(cfg, MarketMode::kAlgorithm1);
  const MarketTrace b = run_market(cfg, MarketMode::kCaseII);
  ASSERT_GE(a.iterations.size(), 2u);
  ASSERT_GE(b.iterations.size(), 2u);
  EXPECT_GT(a.iterations[0].state.allocation[3], 0.0);
  for (std::size_t i = 1; i < a.iterations.size(); ++i) {
    EXPECT_DOUBLE_EQ(a.iterations[i].state.allocation[3], 0.0);
    EXPECT_DOUBLE_EQ(a.iterations[i].state.q_star[3], 0.0);
  }
  for (std::size_t i = 1; i < b.iterations.size(); ++i) {
    EXPECT_GT(b.iterations[i].state.allocation[3], 0.0);
    EXPECT_DOUBLE_EQ(b.iterations[i].state.q_star[3], 0.0);
    EXPECT_GE(b.iterations[i].state.payment_weight, 1.0);
  }
}

TEST(RunMarket, CaseOneAlwaysPaysEveryone) {
  const MarketConfig cfg = baseline();
  const MarketTrace t = run_market(cfg, MarketMode::kCaseI);
  for (const auto& r : t.iterations) {
    EXPECT_DOUBLE_EQ(r.state.payment_weight, 3.0);
    EXPECT_EQ(r.active.size(), 3u);
  }
}

EquilibriumState hand_state(const MarketConfig& cfg, double price) {
  EquilibriumState s;
  s.eps_asked = 1.0;
  s.performance = 10.0;
  s.payment_weight = 1.0;
  s.price_offered = price;
  s.contributions = {0.0, 0.5, 0.3, 0.2};
  s.allocation = allocate_prices(price, s.contributions);
  s.eligible = {false, true, true, true};
  const ResponseModel m = ResponseModel::from_config(cfg, 1.0, s.allocation, s.eligible);
  s.q_star = solve_fixed_point(m).q;
  return s;
}

TEST(Stackelberg, OptimumPassesAndPerturbationFails) {
  MarketConfig cfg;
  cfg.p_max = 2.0;
  const double p_star = optimize_price(concave_problem()).price;
  const StackelbergReport good = check_stackelberg(hand_state(cfg, p_star), cfg);
  EXPECT_LE(good.leader_violation, 1e-9);
  EXPECT_LE(good.follower_violation, 1e-9);
  const StackelbergReport bad = check_stackelberg(hand_state(cfg, 0.5), cfg);
  EXPECT_GT(bad.leader_violation, 1e-3);
}

TEST(Stackelberg, MarketFinalStatesAreEquilibria) {
  MarketConfig cfg = baseline();
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    cfg.seed = seed;
    for (MarketMode m : {MarketMode::kAlgorithm1, MarketMode::kCaseII}) {
      const MarketTrace t = run_market(cfg, m);
      const StackelbergReport r = check_stackelberg(t.final_record().state, cfg);
      EXPECT_LE(r.max_violation(), 1e-6) << seed << " " << to_string(m);
    }
  }
}

TEST(Incentives, TruthfulReportsAreRationalAndCompatible) {
  MarketConfig cfg = baseline();
  cfg.p_max = 10.0;
  cfg.C.assign(4, 0.1);
  const MarketTrace t = run_algorithm1(cfg);
  const IncentiveReport r =
      check_incentives(t.final_record().state, cfg, t.eps_types, 200, 5);
  EXPECT_TRUE(r.individually_rational);
  EXPECT_TRUE(r.incentive_compatible);
  EXPECT_LE(r.max_misreport_gain, 0.0);
}

TEST(TraceOutput, JsonAndCsvShapes) {
  const MarketConfig cfg = baseline();
  const MarketTrace t = run_algorithm1(cfg);
  const auto j = trace_to_json(t, cfg, MarketMode::kAlgorithm1);
  EXPECT_EQ(j["mode"], "algorithm1");
  EXPECT_EQ(j["iterations"].size(), t.iterations.size());
  EXPECT_EQ(j["iterations_to_convergence"], t.iterations.size());
  std::ostringstream os;
  write_trace_csv(t, os);
  const std::string csv = os.str();
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "iter,agent,q,eps_response,price,contribution,utility");
  std::size_t lines = 0;
  for (char c : csv) lines += c == '\n';
  EXPECT_EQ(lines, 1 + 3 * t.iterations.size());
}

}  // namespace
}  // namespace regmarket
