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

#include "regmarket/market_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Eigenvalues>

namespace regmarket {
namespace {

double per_agent(const std::vector<double>& v, std::size_t agent,
                 double fallback) {
  return v.empty() ? fallback : v.at(agent);
}

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void check_per_agent(const std::vector<double>& v, std::size_t n,
                     const char* name) {
  if (v.empty()) return;
  if (v.size() != n) {
    fail(std::string(name) + " must have one entry per agent (" +
         std::to_string(n) + ")");
  }
  for (double x : v) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      fail(std::string(name) + " entries must be finite and >= 0");
    }
  }
}

}  // namespace

Matrix MarketConfig::correlation() const {
  const auto k = static_cast<Eigen::Index>(num_features());
  if (corr.empty()) return Matrix::Identity(k, k);
  Matrix m(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) m(i, j) = corr.at(i).at(j);
  }
  return m;
}

double MarketConfig::psi_of(std::size_t agent) const {
  return per_agent(psi, agent, 1.0);
}
double MarketConfig::phi_of(std::size_t agent) const {
  return per_agent(phi, agent, 1.0);
}
double MarketConfig::cost_of(std::size_t agent) const {
  return per_agent(C, agent, 1.0);
}
double MarketConfig::extra_noise_of(std::size_t agent) const {
  return per_agent(extra_noise_std, agent, 0.0);
}

std::size_t MarketConfig::owner_of(std::size_t feature) const {
  return feature_owner.empty() ? feature : feature_owner.at(feature);
}

std::vector<std::size_t> MarketConfig::features_of(std::size_t agent) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < num_features(); ++k) {
    if (owner_of(k) == agent) out.push_back(k);
  }
  return out;
}

std::vector<std::size_t> FeaturePanel::features_of(std::size_t agent) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < ownership.size(); ++k) {
    if (ownership[k] == agent) out.push_back(k);
  }
  return out;
}

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::kEmptyActiveSet:
      return "empty_active_set";
    case StopReason::kConverged:
      return "converged";
    case StopReason::kIterationLimit:
      return "iteration_limit";
  }
  return "unknown";
}

const char* to_string(ValuationForm form) {
  return form == ValuationForm::kLog ? "log" : "power";
}

const char* to_string(PerformanceForm form) {
  return form == PerformanceForm::kReciprocal ? "reciprocal" : "gap";
}

MarketConfig validate_config(const MarketConfig& cfg) {
  if (cfg.n_agents < 1) fail("n_agents must be at least 1");
  if (cfg.n_agents > 32) fail("n_agents must be at most 32");
  if (cfg.theta_true.size() < 2) {
    fail("theta_true must hold a bias and at least one feature weight");
  }
  const std::size_t k = cfg.num_features();
  if (cfg.tau <= k + 1) fail("tau must exceed the number of features plus one");
  if (!(cfg.noise_var >= 0.0)) fail("noise_var must be >= 0");

  if (!cfg.corr.empty()) {
    if (cfg.corr.size() != k) fail("corr must be K x K with K = len(theta_true)-1");
    for (const auto& row : cfg.corr) {
      if (row.size() != k) fail("corr must be K x K with K = len(theta_true)-1");
      for (double v : row) {
        if (!(v >= -1.0 && v <= 1.0)) fail("correlation outside [−1,1]");
      }
    }
    const Matrix m = cfg.correlation();
    for (std::size_t i = 0; i < k; ++i) {
      if (m(i, i) != 1.0) fail("corr must have a unit diagonal");
      for (std::size_t j = 0; j < i; ++j) {
        if (m(i, j) != m(j, i)) fail("corr must be symmetric");
      }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) {
      fail("corr must be positive semidefinite");
    }
  }

  if (!(cfg.alpha > 0.0)) fail("alpha must be > 0");
  if (!(cfg.beta > -1.0 && cfg.beta < 0.0)) {
    fail("beta must lie strictly in (−1,0)");
  }
  if (!(cfg.gamma > 0.0)) fail("gamma must be > 0");
  check_per_agent(cfg.psi, cfg.n_agents, "psi");
  check_per_agent(cfg.phi, cfg.n_agents, "phi");
  check_per_agent(cfg.C, cfg.n_agents, "C");
  check_per_agent(cfg.extra_noise_std, cfg.n_agents, "extra_noise_std");
  if (!(cfg.eps_l >= 0.0 && cfg.eps_l < cfg.eps_u)) {
    fail("eps_l and eps_u must satisfy 0 <= eps_l < eps_u");
  }
  if (!(cfg.eps_ref > 0.0)) fail("eps_ref must be > 0");
  if (!(cfg.eps_ref <= cfg.eps_u)) fail("eps_ref must not exceed eps_u");
  if (!std::isfinite(cfg.zeta_ref)) fail("zeta_ref must be finite");
  if (!(cfg.p_max > 0.0) || !std::isfinite(cfg.p_max)) fail("p_max must be > 0");
  if (!(cfg.clip_bound > 0.0)) fail("clip_bound must be > 0");
  if (cfg.max_iterations < 1) fail("max_iterations must be at least 1");

  if (cfg.feature_owner.empty()) {
    if (k != cfg.n_agents) {
      fail("feature_owner is required unless there is one feature per agent");
    }
  } else {
    if (cfg.feature_owner.size() != k) {
      fail("feature_owner must list an owner for every feature");
    }
    for (std::size_t owner : cfg.feature_owner) {
      if (owner >= cfg.n_agents) fail("feature_owner refers to an unknown agent");
    }
  }
  std::set<std::size_t> departed;
  for (const auto& d : cfg.departures) {
    if (d.agent == 0 || d.agent >= cfg.n_agents) {
      fail("departures must name a supporting agent");
    }
    if (d.iteration < 1) fail("departure iteration is 1-based");
    if (!departed.insert(d.agent).second) {
      fail("departures lists an agent twice");
    }
  }
  return cfg;
}

MarketConfig default_config() { return MarketConfig{}; }

}  // namespace regmarket
