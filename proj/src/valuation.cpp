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

#include "regmarket/valuation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "regmarket/datagen.hpp"
#include "regmarket/format.hpp"
#include "regmarket/privacy.hpp"

namespace regmarket {

ContributionReport shapley_exact(std::size_t n, const CoalitionValue& value) {
  if (n > kMaxExactPlayers) {
    throw std::invalid_argument(
        "shapley_exact supports at most 12 players; use shapley_mc");
  }
  ContributionReport r;
  r.agents.resize(n);
  std::iota(r.agents.begin(), r.agents.end(), std::size_t{0});
  r.shapley.assign(n, 0.0);
  r.std_error.assign(n, 0.0);
  const Coalition full = n == 0 ? 0 : static_cast<Coalition>((1u << n) - 1);

  std::vector<double> v(static_cast<std::size_t>(full) + 1);
  for (Coalition s = 0; s <= full; ++s) {
    v[s] = value(s);
    r.coalition_scores[s] = v[s];
  }
  // weight[k] = k! (n-k-1)! / n!
  std::vector<double> weight(n);
  for (std::size_t k = 0; k < n; ++k) {
    weight[k] = std::exp(std::lgamma(k + 1.0) + std::lgamma(n - k + 0.0) -
                         std::lgamma(n + 1.0));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Coalition bit = 1u << i;
    double acc = 0.0;
    for (Coalition s = 0; s <= full; ++s) {
      if (s & bit) continue;
      acc += weight[std::popcount(s)] * (v[s | bit] - v[s]);
    }
    r.shapley[i] = acc;
  }
  r.normalized = normalize_contributions(r.shapley);
  return r;
}

ContributionReport shapley_mc(std::size_t n, const CoalitionValue& value,
                              std::size_t n_perms, Rng& rng) {
  if (n_perms == 0) throw std::invalid_argument("n_perms must be >= 1");
  if (n > 32) throw std::invalid_argument("at most 32 players");
  ContributionReport r;
  r.agents.resize(n);
  std::iota(r.agents.begin(), r.agents.end(), std::size_t{0});
  std::vector<double> sum(n, 0.0), sum_sq(n, 0.0);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t p = 0; p < n_perms; ++p) {
    // Fisher-Yates with our own uniforms for portability.
    for (std::size_t i = n; i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform01(rng) * i);
      std::swap(order[i - 1], order[std::min(j, i - 1)]);
    }
    Coalition s = 0;
    double prev = value(s);
    for (std::size_t idx : order) {
      s |= 1u << idx;
      const double cur = value(s);
      const double m = cur - prev;
      sum[idx] += m;
      sum_sq[idx] += m * m;
      prev = cur;
    }
  }
  const double m = static_cast<double>(n_perms);
  r.shapley.resize(n);
  r.std_error.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    r.shapley[i] = sum[i] / m;
    if (n_perms > 1) {
      const double var =
          std::max(0.0, (sum_sq[i] - m * r.shapley[i] * r.shapley[i]) / (m - 1));
      r.std_error[i] = std::sqrt(var / m);
    } else {
      r.std_error[i] = 0.0;
    }
  }
  r.normalized = normalize_contributions(r.shapley);
  return r;
}

std::vector<double> normalize_contributions(const std::vector<double>& shapley) {
  std::vector<double> out(shapley.size(), 0.0);
  double total = 0.0;
  for (double v : shapley) total += std::max(v, 0.0);
  if (total <= 0.0) return out;
  for (std::size_t i = 0; i < shapley.size(); ++i) {
    out[i] = std::max(shapley[i], 0.0) / total;
  }
  return out;
}

CoalitionScorer::CoalitionScorer(GramLoss gram, FeatureSet central,
                                 std::vector<FeatureSet> player_features)
    : gram_(std::move(gram)),
      central_(std::move(central)),
      players_(std::move(player_features)) {
  if (players_.size() > 32) throw std::invalid_argument("at most 32 players");
  loss_central_ = gram_.loss(central_);
  const Coalition full =
      players_.empty() ? 0 : static_cast<Coalition>((1ull << players_.size()) - 1);
  loss_all_ = gram_.loss(features(full));
}

CoalitionScorer CoalitionScorer::for_panel(
    const FeaturePanel& panel, const std::vector<std::size_t>& agents) {
  std::vector<FeatureSet> players;
  for (std::size_t a : agents) players.push_back(panel.features_of(a));
  return CoalitionScorer(GramLoss::from_panel(panel), panel.features_of(0),
                         std::move(players));
}

FeatureSet CoalitionScorer::features(Coalition s) const {
  FeatureSet f = central_;
  for (std::size_t i = 0; i < players_.size(); ++i) {
    if (s & (1u << i)) f.insert(f.end(), players_[i].begin(), players_[i].end());
  }
  std::sort(f.begin(), f.end());
  return f;
}

double CoalitionScorer::loss(Coalition s) const {
  auto it = cache_.find(s);
  if (it != cache_.end()) return it->second;
  const double l = gram_.loss(features(s));
  cache_.emplace(s, l);
  return l;
}

double CoalitionScorer::score(Coalition s) const {
  const double denom = std::max(kScoreFloor, loss_central_ - loss_all_);
  return std::clamp((loss_central_ - loss(s)) / denom, 0.0, 1.0);
}

CoalitionValue CoalitionScorer::as_value() const {
  return [this](Coalition s) { return score(s); };
}

namespace {

std::vector<std::size_t> panel_supporting_agents(const FeaturePanel& panel) {
  std::vector<std::size_t> agents;
  for (std::size_t owner : panel.ownership) {
    if (owner != 0 &&
        std::find(agents.begin(), agents.end(), owner) == agents.end()) {
      agents.push_back(owner);
    }
  }
  std::sort(agents.begin(), agents.end());
  return agents;
}

void relabel(ContributionReport& r, const std::vector<std::size_t>& agents) {
  r.agents = agents;
}

}  // namespace

double coalition_score(const FeaturePanel& panel,
                       const std::vector<std::size_t>& coalition) {
  const auto agents = panel_supporting_agents(panel);
  const auto scorer = CoalitionScorer::for_panel(panel, agents);
  Coalition s = 0;
  for (std::size_t a : coalition) {
    auto it = std::find(agents.begin(), agents.end(), a);
    if (it == agents.end()) {
      throw std::invalid_argument("coalition member owns no panel feature");
    }
    s |= 1u << static_cast<unsigned>(it - agents.begin());
  }
  return scorer.score(s);
}

ContributionReport shapley_exact(const FeaturePanel& panel,
                                 const std::vector<std::size_t>& agents) {
  const auto scorer = CoalitionScorer::for_panel(panel, agents);
  auto r = shapley_exact(agents.size(), scorer.as_value());
  relabel(r, agents);
  return r;
}

ContributionReport shapley_mc(const FeaturePanel& panel,
                              const std::vector<std::size_t>& agents,
                              std::size_t n_perms, Rng& rng) {
  const auto scorer = CoalitionScorer::for_panel(panel, agents);
  auto r = shapley_mc(agents.size(), scorer.as_value(), n_perms, rng);
  relabel(r, agents);
  return r;
}

DistortionGrid contributions_under_distortion(const MarketConfig& base,
                                              const DistortionOptions& opts) {
  DistortionGrid grid;
  grid.rho = opts.rho;
  grid.sigma = opts.sigma;
  for (std::size_t n = 1; n < base.n_agents; ++n) grid.agents.push_back(n);
  const std::size_t na = grid.agents.size();
  grid.value.assign(opts.rho.size(),
                    std::vector<std::vector<double>>(
                        opts.sigma.size(), std::vector<double>(na, 0.0)));

  for (std::size_t seed = 0; seed < opts.seeds; ++seed) {
    for (std::size_t r = 0; r < opts.rho.size(); ++r) {
      MarketConfig cfg = base;
      cfg.seed = base.seed + seed;
      Matrix corr = cfg.correlation();
      const auto a = static_cast<Eigen::Index>(opts.correlated_a);
      const auto b = static_cast<Eigen::Index>(opts.correlated_b);
      corr(a, b) = corr(b, a) = opts.rho[r];
      cfg.corr.assign(corr.rows(), std::vector<double>(corr.cols()));
      for (Eigen::Index i = 0; i < corr.rows(); ++i) {
        for (Eigen::Index j = 0; j < corr.cols(); ++j) cfg.corr[i][j] = corr(i, j);
      }
      const FeaturePanel clean = generate_panel(cfg);
      const Matrix field =
          opts.ldp_epsilon > 0.0
              ? unit_laplace_field(clean.tau(), clean.num_features(), cfg.seed)
              : Matrix();
      for (std::size_t s = 0; s < opts.sigma.size(); ++s) {
        AgentProfile noisy = make_agent(cfg, opts.noisy_agent);
        noisy.extra_noise_std = opts.sigma[s];
        FeaturePanel panel = inject_gaussian_noise(clean, noisy, cfg.seed);
        if (opts.ldp_epsilon > 0.0) {
          std::vector<double> eps(cfg.n_agents, opts.ldp_epsilon);
          eps[0] = 0.0;
          panel = perturb_panel(panel, eps, cfg.clip_bound, field);
        }
        const auto rep = shapley_exact(panel, grid.agents);
        for (std::size_t i = 0; i < na; ++i) {
          grid.value[r][s][i] += rep.normalized[i] / static_cast<double>(opts.seeds);
        }
      }
    }
  }
  return grid;
}

void write_heatmap_csv(const DistortionGrid& grid, std::ostream& out) {
  out << "rho,sigma,agent,normalized_contribution\n";
  for (std::size_t r = 0; r < grid.rho.size(); ++r) {
    for (std::size_t s = 0; s < grid.sigma.size(); ++s) {
      for (std::size_t i = 0; i < grid.agents.size(); ++i) {
        out << format_number(grid.rho[r]) << "," << format_number(grid.sigma[s])
            << "," << (grid.agents[i] + 1) << ","
            << format_number(grid.value[r][s][i]) << "\n";
      }
    }
  }
}

}  // namespace regmarket
