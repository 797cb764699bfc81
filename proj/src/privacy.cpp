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

#include "regmarket/privacy.hpp"

#include <algorithm>

namespace regmarket {

double clip(double value, double bound) {
  return std::clamp(value, -bound, bound);
}

double ldp_perturb(double value, const PrivacySpec& spec, Rng& rng) {
  return clip(value, spec.clip_bound) + spec.scale() * unit_laplace(rng);
}

Matrix unit_laplace_field(std::size_t tau, std::size_t k, std::uint64_t seed) {
  Rng rng = make_rng(seed, Stream::kLdp);
  Matrix field(static_cast<Eigen::Index>(tau), static_cast<Eigen::Index>(k));
  for (Eigen::Index t = 0; t < field.rows(); ++t) {
    for (Eigen::Index j = 0; j < field.cols(); ++j) field(t, j) = unit_laplace(rng);
  }
  return field;
}

FeaturePanel perturb_panel(const FeaturePanel& panel,
                           const std::vector<double>& eps_by_agent,
                           double clip_bound, const Matrix& field) {
  FeaturePanel out = panel;
  for (std::size_t f = 0; f < panel.ownership.size(); ++f) {
    const double eps = eps_by_agent.at(panel.ownership[f]);
    if (eps <= 0.0) continue;
    const auto col = static_cast<Eigen::Index>(f);
    const double scale = PrivacySpec::with_clip(eps, clip_bound).scale();
    out.x.col(col) =
        panel.x.col(col).array().max(-clip_bound).min(clip_bound).matrix() +
        scale * field.col(col);
  }
  return out;
}

std::vector<double> sample_preferences(const MarketConfig& cfg, Rng& rng) {
  std::vector<double> eps(cfg.n_agents, 0.0);
  for (std::size_t n = 1; n < cfg.n_agents; ++n) {
    eps[n] = uniform(rng, cfg.eps_l, cfg.eps_u);
  }
  return eps;
}

double preference_cdf(double eps, double eps_l, double eps_u) {
  return std::clamp((eps - eps_l) / (eps_u - eps_l), 0.0, 1.0);
}

double preference_cdf(double eps, const MarketConfig& cfg) {
  return preference_cdf(eps, cfg.eps_l, cfg.eps_u);
}

}  // namespace regmarket
