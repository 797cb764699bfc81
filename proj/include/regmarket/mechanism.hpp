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

// The learner's side of the market: valuation, utility, pricing, the
// iterative backward-induction loop, the two baselines, and the Stackelberg
// equilibrium check.

#ifndef REGMARKET_MECHANISM_HPP_
#define REGMARKET_MECHANISM_HPP_

#include <functional>
#include <ostream>
#include <vector>

#include "json.hpp"
#include "regmarket/equilibrium.hpp"
#include "regmarket/market_model.hpp"
#include "regmarket/privacy.hpp"
#include "regmarket/regression.hpp"

namespace regmarket {

inline constexpr double kPerformanceFloor = 1e-9;
inline constexpr double kMinParticipation = 0.01;

// -beta ln(alpha eps p + 1), or (ln(alpha eps p + 1))^(-beta) for kPower.
double learner_valuation(double eps, double p, double alpha, double beta,
                         ValuationForm form = ValuationForm::kLog);

struct UtilityParams {
  double alpha = 0.45;
  double beta = -0.4;
  double eps_l = 0.1;
  double eps_u = 4.0943445622221004;
  ValuationForm form = ValuationForm::kLog;

  static UtilityParams from_config(const MarketConfig& cfg);
};

// S = L U(eps, p) - p W, where W is the number (or expected number) of paid
// participants. An ask of exactly 0 buys nothing useful and still pays; an
// ask elsewhere outside [eps_l, eps_u] attracts nobody, so S = 0.
double central_utility(double p, double eps, double performance,
                       double payment_weight, const UtilityParams& params);

struct PerformanceReport {
  double value = 0.0;
  double gap = 0.0;
  bool degenerate = false;
  bool meets_reference = false;
};

// From the learner's loss alone and with the traded features.
PerformanceReport performance_improvement(
    double loss_central, double loss_with, double zeta_ref,
    PerformanceForm form = PerformanceForm::kReciprocal);

// Perturbs the participants' columns at their privacy factors and compares
// mean squared losses (learner alone vs. learner plus participants).
PerformanceReport performance_improvement(
    const FeaturePanel& panel, const std::vector<std::size_t>& participants,
    const std::vector<PrivacySpec>& specs, const Matrix& unit_noise,
    double zeta_ref, PerformanceForm form = PerformanceForm::kReciprocal);

// p * L_n / sum(L), with negative contributions treated as 0.
std::vector<double> allocate_prices(double p,
                                    const std::vector<double>& contributions);

double asked_epsilon_update(const std::vector<double>& eps_responses,
                            double eps_ref);

struct PriceProblem {
  double performance = 0.0;
  double eps = 1.0;
  double payment_weight = 0.0;
  // When set, the payment weight anticipated at price p; overrides
  // payment_weight.
  std::function<double(double)> weight_at;
  double p_floor = 0.0;  // exclusive lower end of the bracket
  double p_max = 1.0;
  UtilityParams params;
};

struct PriceSolution {
  double price = 0.0;
  double utility = 0.0;
  bool empty_bracket = false;
};

// Golden-section search on (p_floor, p_max] to 1e-6, keeping p_max when it
// scores at least as well.
PriceSolution optimize_price(const PriceProblem& problem);

// W(p) for a recorded state; payment_weight when the state is not
// anticipating participation.
double anticipated_weight(const EquilibriumState& state,
                          const MarketConfig& cfg, double p);

enum class MarketMode { kAlgorithm1, kCaseI, kCaseII };
const char* to_string(MarketMode mode);

MarketTrace run_market(const MarketConfig& cfg, MarketMode mode);
MarketTrace run_algorithm1(const MarketConfig& cfg);
MarketTrace run_baseline(const MarketConfig& cfg, MarketMode mode);

struct StackelbergReport {
  double leader_violation = 0.0;
  double follower_violation = 0.0;
  double max_violation() const {
    return leader_violation > follower_violation ? leader_violation
                                                 : follower_violation;
  }
};

// Leader: S(p*, eps*) against the prices p_max * i / 100 above the price
// floor, each with its anticipated weight. Followers: the
// ex-ante utility of the equilibrium cutoff eps_n(q*) against the cutoffs
// eps_n(q) for 100 deviations q in [0, 1].
StackelbergReport check_stackelberg(const EquilibriumState& state,
                                    const MarketConfig& cfg,
                                    std::size_t leader_points = 100,
                                    std::size_t follower_points = 100);

struct IncentiveReport {
  std::size_t participants = 0;
  // Smallest realized utility among participants (0 when none).
  double min_participant_utility = 0.0;
  // Largest gain any agent could get from a misreport (should be <= 0).
  double max_misreport_gain = 0.0;
  bool individually_rational = true;
  bool incentive_compatible = true;
};

// Truthful agents join iff eps* <= eps_n <= eps_n(q*). A misreport r changes
// the decision to the one an agent of type r would take while the realized
// utility is still evaluated at the true type.
IncentiveReport check_incentives(const EquilibriumState& state,
                                 const MarketConfig& cfg,
                                 const std::vector<double>& eps_types,
                                 std::size_t misreports, std::uint64_t seed);

nlohmann::ordered_json trace_to_json(const MarketTrace& trace,
                                     const MarketConfig& cfg, MarketMode mode);
// CSV: iter,agent,q,eps_response,price,contribution,utility
void write_trace_csv(const MarketTrace& trace, std::ostream& out);

}  // namespace regmarket

#endif  // REGMARKET_MECHANISM_HPP_
