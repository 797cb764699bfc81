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

// Laplace local differential privacy on clipped features, and the uniform
// privacy-type distribution of supporting agents.

#ifndef REGMARKET_PRIVACY_HPP_
#define REGMARKET_PRIVACY_HPP_

#include <vector>

#include "regmarket/market_model.hpp"
#include "regmarket/rng.hpp"

namespace regmarket {

struct PrivacySpec {
  double epsilon = 1.0;
  double clip_bound = 3.0;
  // Width of the clipped domain, 2B unless set explicitly.
  double sensitivity = 6.0;

  static PrivacySpec with_clip(double epsilon, double clip_bound) {
    return PrivacySpec{epsilon, clip_bound, 2.0 * clip_bound};
  }
  double scale() const { return sensitivity / epsilon; }
};

double clip(double value, double bound);

// clip(value, +-B) + Laplace(0, sensitivity / epsilon).
double ldp_perturb(double value, const PrivacySpec& spec, Rng& rng);

// Unit Laplace draws for every panel entry. Scaling one field by
// sensitivity / epsilon gives the mechanism's noise at any epsilon from the
// same underlying draws, so markets that revisit an epsilon see the same data.
Matrix unit_laplace_field(std::size_t tau, std::size_t k, std::uint64_t seed);

// Returns a panel whose columns owned by agents with eps[agent] > 0 are
// clipped and perturbed with noise scale(eps[agent]) * field. Columns of agents
// with eps[agent] <= 0 (the learner, by convention) are left untouched.
FeaturePanel perturb_panel(const FeaturePanel& panel,
                           const std::vector<double>& eps_by_agent,
                           double clip_bound, const Matrix& field);

// One U[eps_l, eps_u] draw per supporting agent (index 0 of the result is the
// learner and is set to 0).
std::vector<double> sample_preferences(const MarketConfig& cfg, Rng& rng);

double preference_cdf(double eps, const MarketConfig& cfg);
double preference_cdf(double eps, double eps_l, double eps_u);

}  // namespace regmarket

#endif  // REGMARKET_PRIVACY_HPP_
