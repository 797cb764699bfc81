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

// Deterministic random streams. One master seed is split into independent
// per-purpose streams so that changing one knob leaves unrelated draws alone.

#ifndef REGMARKET_RNG_HPP_
#define REGMARKET_RNG_HPP_

#include <cstdint>
#include <random>

namespace regmarket {

using Rng = std::mt19937_64;

enum class Stream : std::uint64_t {
  kPanel = 1,
  kAgentNoise = 2,
  kPreferences = 3,
  kShapley = 4,
  kLdp = 5,
  kInitialAsk = 6,
  kMisreport = 7,
  kInstance = 8,
};

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z);

std::uint64_t derive_seed(std::uint64_t master, Stream stream,
                          std::uint64_t index = 0);

Rng make_rng(std::uint64_t master, Stream stream, std::uint64_t index = 0);

double standard_normal(Rng& rng);
// Uniform on [0, 1).
double uniform01(Rng& rng);
double uniform(Rng& rng, double lo, double hi);
// Laplace(0, 1) by inversion.
double unit_laplace(Rng& rng);

}  // namespace regmarket

#endif  // REGMARKET_RNG_HPP_
