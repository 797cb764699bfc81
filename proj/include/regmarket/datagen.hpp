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

// Seeded synthetic panels: correlated standard-normal features and a linear
// target with Gaussian noise.

#ifndef REGMARKET_DATAGEN_HPP_
#define REGMARKET_DATAGEN_HPP_

#include <cstdint>
#include <ostream>

#include "regmarket/market_model.hpp"

namespace regmarket {

// Lower-triangular L with L L^T = corr for a positive semidefinite corr. Zero
// pivots produce zero columns, so a correlation of exactly 1 yields identical
// features.
Matrix semidefinite_cholesky(const Matrix& corr);

FeaturePanel generate_panel(const MarketConfig& cfg);

// Copy of panel with i.i.d. N(0, agent.extra_noise_std^2) added to the
// agent's columns.
FeaturePanel inject_gaussian_noise(const FeaturePanel& panel,
                                   const AgentProfile& agent,
                                   std::uint64_t seed);

// Applies cfg.extra_noise_std to every agent.
FeaturePanel apply_configured_noise(const FeaturePanel& panel,
                                    const MarketConfig& cfg);

AgentProfile make_agent(const MarketConfig& cfg, std::size_t id,
                        double eps_type = 0.0);

// CSV with header t,x1..xK,y and 17 significant digits.
void write_panel_csv(const FeaturePanel& panel, std::ostream& out);

}  // namespace regmarket

#endif  // REGMARKET_DATAGEN_HPP_
