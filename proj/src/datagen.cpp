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

#include "regmarket/datagen.hpp"

#include <cmath>
#include <iomanip>

#include "regmarket/rng.hpp"

namespace regmarket {

Matrix semidefinite_cholesky(const Matrix& corr) {
  const Eigen::Index k = corr.rows();
  Matrix l = Matrix::Zero(k, k);
  constexpr double kPivotTol = 1e-12;
  for (Eigen::Index j = 0; j < k; ++j) {
    double d = corr(j, j) - l.row(j).head(j).squaredNorm();
    if (d <= kPivotTol) continue;
    l(j, j) = std::sqrt(d);
    for (Eigen::Index i = j + 1; i < k; ++i) {
      l(i, j) = (corr(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
    }
  }
  return l;
}

FeaturePanel generate_panel(const MarketConfig& cfg) {
  const auto tau = static_cast<Eigen::Index>(cfg.tau);
  const auto k = static_cast<Eigen::Index>(cfg.num_features());
  Rng rng = make_rng(cfg.seed, Stream::kPanel);

  Matrix z(tau, k);
  Vector noise(tau);
  const double noise_sd = std::sqrt(cfg.noise_var);
  for (Eigen::Index t = 0; t < tau; ++t) {
    for (Eigen::Index j = 0; j < k; ++j) z(t, j) = standard_normal(rng);
    noise(t) = noise_sd * standard_normal(rng);
  }

  FeaturePanel panel;
  panel.x = z * semidefinite_cholesky(cfg.correlation()).transpose();
  Eigen::Map<const Vector> theta(cfg.theta_true.data() + 1, k);
  panel.y = (panel.x * theta).array() + cfg.theta_true[0];
  panel.y += noise;
  panel.ownership.resize(cfg.num_features());
  for (std::size_t f = 0; f < cfg.num_features(); ++f) {
    panel.ownership[f] = cfg.owner_of(f);
  }
  return panel;
}

FeaturePanel inject_gaussian_noise(const FeaturePanel& panel,
                                   const AgentProfile& agent,
                                   std::uint64_t seed) {
  FeaturePanel out = panel;
  if (agent.extra_noise_std == 0.0) return out;
  Rng rng = make_rng(seed, Stream::kAgentNoise, agent.id);
  for (std::size_t f : agent.features) {
    for (Eigen::Index t = 0; t < out.x.rows(); ++t) {
      out.x(t, static_cast<Eigen::Index>(f)) +=
          agent.extra_noise_std * standard_normal(rng);
    }
  }
  return out;
}

AgentProfile make_agent(const MarketConfig& cfg, std::size_t id,
                        double eps_type) {
  AgentProfile a;
  a.id = id;
  a.eps_type = eps_type;
  a.q = 0.0;
  a.features = cfg.features_of(id);
  a.extra_noise_std = cfg.extra_noise_of(id);
  return a;
}

FeaturePanel apply_configured_noise(const FeaturePanel& panel,
                                    const MarketConfig& cfg) {
  FeaturePanel out = panel;
  for (std::size_t n = 0; n < cfg.n_agents; ++n) {
    if (cfg.extra_noise_of(n) > 0.0) {
      out = inject_gaussian_noise(out, make_agent(cfg, n), cfg.seed);
    }
  }
  return out;
}

void write_panel_csv(const FeaturePanel& panel, std::ostream& out) {
  out << "t";
  for (Eigen::Index j = 0; j < panel.x.cols(); ++j) out << ",x" << (j + 1);
  out << ",y\n";
  const auto old_precision = out.precision(17);
  for (Eigen::Index t = 0; t < panel.x.rows(); ++t) {
    out << (t + 1);
    for (Eigen::Index j = 0; j < panel.x.cols(); ++j) out << "," << panel.x(t, j);
    out << "," << panel.y(t) << "\n";
  }
  out.precision(old_precision);
}

}  // namespace regmarket
