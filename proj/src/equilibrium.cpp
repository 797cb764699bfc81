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

#include "regmarket/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "regmarket/privacy.hpp"

namespace regmarket {
namespace {

double nonneg_sum(const std::vector<double>& q) {
  return std::accumulate(q.begin(), q.end(), 0.0);
}

}  // namespace

double leakage_expectation(const std::vector<double>& q, double phi) {
  return phi * std::log1p(nonneg_sum(q));
}

double agent_valuation(double q, double p_n, double eps_asked) {
  return p_n * eps_asked * q;
}

Utility agent_utility(const UtilityInputs& in) {
  if (in.eps_asked > in.eps_type) return Utility::excluded_state();
  return Utility{in.gamma * in.valuation - in.eps_type * in.leak -
                     in.psi * in.cost_rate * in.eps_asked,
                 false};
}

double epsilon_response(double gamma_valuation, double psi_cost, double leak) {
  return (gamma_valuation - psi_cost) / std::max(leak, kLeakFloor);
}

double ResponseModel::numerator(std::size_t n) const {
  return gamma * agent_valuation(1.0, price[n], eps_asked) -
         psi[n] * cost_rate[n] * eps_asked;
}

double ResponseModel::response(const std::vector<double>& q,
                               std::size_t n) const {
  if (!eligible[n]) return eps_l - 1.0;
  return numerator(n) / std::max(leakage_expectation(q, phi[n]), kLeakFloor);
}

double ResponseModel::cdf(double eps) const {
  return preference_cdf(eps, eps_l, eps_u);
}

ResponseModel ResponseModel::from_config(const MarketConfig& cfg,
                                         double eps_asked,
                                         const std::vector<double>& price,
                                         const std::vector<bool>& eligible) {
  ResponseModel m;
  m.gamma = cfg.gamma;
  m.eps_asked = eps_asked;
  m.price = price;
  m.eligible = eligible;
  m.eps_l = cfg.eps_l;
  m.eps_u = cfg.eps_u;
  const std::size_t n = price.size();
  m.phi.resize(n);
  m.psi.resize(n);
  m.cost_rate.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    m.phi[i] = cfg.phi_of(i);
    m.psi[i] = cfg.psi_of(i);
    m.cost_rate[i] = cfg.cost_of(i);
  }
  return m;
}

double fixed_point_residual(const std::vector<double>& q,
                            const ResponseFn& response, const CdfFn& cdf) {
  double worst = 0.0;
  for (std::size_t n = 0; n < q.size(); ++n) {
    worst = std::max(worst, std::abs(cdf(response(q, n)) - q[n]));
  }
  return worst;
}

FixedPointResult solve_fixed_point(std::size_t n, const ResponseFn& response,
                                   const CdfFn& cdf,
                                   const FixedPointOptions& options,
                                   std::vector<double> start) {
  FixedPointResult out;
  out.q = start.empty() ? std::vector<double>(n, 0.0) : std::move(start);
  std::vector<double> scratch(n), next(n);
  out.residual = fixed_point_residual(out.q, response, cdf);
  while (out.residual >= options.tolerance) {
    if (out.sweeps == options.max_sweeps) {
      throw FixedPointError("participation fixed point did not converge; residual " +
                                std::to_string(out.residual),
                            out.residual);
    }
    for (std::size_t i = 0; i < n; ++i) {
      scratch = out.q;
      auto xi = [&](double x) {
        scratch[i] = x;
        return cdf(response(scratch, i)) - x;
      };
      double root;
      if (xi(0.0) <= 0.0) {
        root = 0.0;
      } else if (xi(1.0) >= 0.0) {
        root = 1.0;
      } else {
        double lo = 0.0, hi = 1.0;
        while (hi - lo > 1e-14) {
          const double mid = 0.5 * (lo + hi);
          (xi(mid) > 0.0 ? lo : hi) = mid;
        }
        root = 0.5 * (lo + hi);
      }
      next[i] = root;
    }
    for (std::size_t i = 0; i < n; ++i) {
      out.q[i] = (1.0 - options.damping) * out.q[i] + options.damping * next[i];
    }
    ++out.sweeps;
    out.residual = fixed_point_residual(out.q, response, cdf);
  }
  return out;
}

FixedPointResult solve_fixed_point(const ResponseModel& model,
                                   const FixedPointOptions& options) {
  return solve_fixed_point(
      model.size(),
      [&model](const std::vector<double>& q, std::size_t n) {
        return model.response(q, n);
      },
      [&model](double e) { return model.cdf(e); }, options);
}

std::vector<AgentResponse> evaluate_responses(
    const ResponseModel& model, const std::vector<double>& q,
    const std::vector<double>& eps_types) {
  std::vector<AgentResponse> out(model.size());
  for (std::size_t n = 0; n < model.size(); ++n) {
    AgentResponse& r = out[n];
    r.q = q[n];
    r.eps_response = model.response(q, n);
    r.leak = leakage_expectation(q, model.phi[n]);
    r.cost = model.psi[n] * model.cost_rate[n] * model.eps_asked;
    const Utility u = agent_utility(UtilityInputs{
        model.gamma, agent_valuation(1.0, model.price[n], model.eps_asked),
        eps_types[n], r.leak, model.psi[n], model.cost_rate[n],
        model.eps_asked});
    r.excluded = u.excluded;
    r.utility = u.value;
  }
  return out;
}

double cutoff_utility(double x, double a, double b, double eps_l,
                      double eps_u) {
  const double c = std::clamp(x, eps_l, eps_u);
  return (a * (c - eps_l) - 0.5 * b * (c * c - eps_l * eps_l)) /
         (eps_u - eps_l);
}

}  // namespace regmarket
