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

// Supporting-agent utility, threshold best response, and the Nash
// participation fixed point q = F(eps_n(q)).

#ifndef REGMARKET_EQUILIBRIUM_HPP_
#define REGMARKET_EQUILIBRIUM_HPP_

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "regmarket/market_model.hpp"

namespace regmarket {

inline constexpr double kLeakFloor = 1e-12;

// phi * ln(1 + sum(q)).
double leakage_expectation(const std::vector<double>& q, double phi);

// p_n * eps * q.
double agent_valuation(double q, double p_n, double eps_asked);

// A utility value, or the excluded state for an agent asked for more than
// its privacy type allows.
struct Utility {
  double value = 0.0;
  bool excluded = false;

  static Utility excluded_state() { return Utility{0.0, true}; }
  // Excluded ranks below every finite value.
  bool operator<(const Utility& o) const {
    if (excluded != o.excluded) return excluded;
    return !excluded && value < o.value;
  }
};

struct UtilityInputs {
  double gamma = 1.0;
  double valuation = 0.0;  // V_n
  double eps_type = 0.0;   // the agent's privacy type eps_n
  double leak = 0.0;       // E[I]
  double psi = 1.0;
  double cost_rate = 1.0;  // C_n; the privacy cost is C_n * eps_asked
  double eps_asked = 0.0;
};

// gamma V - eps_n E[I] - psi C eps_asked; excluded when eps_asked > eps_n.
Utility agent_utility(const UtilityInputs& in);

// (gamma V - psi c) / max(E[I], 1e-12).
double epsilon_response(double gamma_valuation, double psi_cost, double leak);

struct AgentResponse {
  double q = 0.0;
  double eps_response = 0.0;
  double utility = 0.0;
  bool excluded = false;
  double leak = 0.0;
  double cost = 0.0;  // psi_n * c_n
};

// Supporting agents' side of the market at a fixed ask and price vector.
// The valuation inside the threshold is the one an agent receives when it
// participates, p_n * eps_asked.
struct ResponseModel {
  double gamma = 1.0;
  double eps_asked = 1.0;
  std::vector<double> price;      // p_{a_n}
  std::vector<double> phi;
  std::vector<double> psi;
  std::vector<double> cost_rate;  // C_n
  std::vector<bool> eligible;     // agents that may participate at all
  double eps_l = 0.0;
  double eps_u = 1.0;

  std::size_t size() const { return price.size(); }
  double numerator(std::size_t n) const;
  // Threshold type eps_n(q) with agent n's own entry of q as given.
  double response(const std::vector<double>& q, std::size_t n) const;
  double cdf(double eps) const;

  static ResponseModel from_config(const MarketConfig& cfg, double eps_asked,
                                   const std::vector<double>& price,
                                   const std::vector<bool>& eligible);
};

using ResponseFn =
    std::function<double(const std::vector<double>& q, std::size_t n)>;
using CdfFn = std::function<double(double)>;

struct FixedPointOptions {
  double tolerance = 1e-8;
  std::size_t max_sweeps = 10000;
  double damping = 0.5;
};

struct FixedPointResult {
  std::vector<double> q;
  double residual = 0.0;
  std::size_t sweeps = 0;
};

class FixedPointError : public std::runtime_error {
 public:
  FixedPointError(const std::string& msg, double residual)
      : std::runtime_error(msg), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// max_n |F(eps_n(q)) - q_n|.
double fixed_point_residual(const std::vector<double>& q,
                            const ResponseFn& response, const CdfFn& cdf);

// Damped synchronous sweeps; within each sweep every agent's own equation
// F(eps_n(q_{-n}, x)) = x is solved by bisection on [0, 1].
FixedPointResult solve_fixed_point(std::size_t n, const ResponseFn& response,
                                   const CdfFn& cdf,
                                   const FixedPointOptions& options = {},
                                   std::vector<double> start = {});
FixedPointResult solve_fixed_point(const ResponseModel& model,
                                   const FixedPointOptions& options = {});

std::vector<AgentResponse> evaluate_responses(
    const ResponseModel& model, const std::vector<double>& q,
    const std::vector<double>& eps_types);

// Ex-ante utility of an agent that joins whenever its type is at most x:
// the integral of (a - b t) dF(t) over [eps_l, x] for uniform F.
double cutoff_utility(double x, double a, double b, double eps_l, double eps_u);

}  // namespace regmarket

#endif  // REGMARKET_EQUILIBRIUM_HPP_
