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

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "regmarket/rng.hpp"

namespace regmarket {
namespace {

TEST(Rng, StreamsAreDistinct) {
  std::set<std::uint64_t> seeds;
  for (Stream s : {Stream::kPanel, Stream::kAgentNoise, Stream::kPreferences,
                   Stream::kShapley, Stream::kLdp, Stream::kInitialAsk,
                   Stream::kMisreport, Stream::kInstance}) {
    for (std::uint64_t i = 0; i < 4; ++i) seeds.insert(derive_seed(7, s, i));
  }
  EXPECT_EQ(seeds.size(), 32u);
}

TEST(Rng, Reproducible) {
  Rng a = make_rng(3, Stream::kPanel), b = make_rng(3, Stream::kPanel);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(standard_normal(a), standard_normal(b));
}

TEST(Rng, KnownSplitMixValue) {
  // First output of SplitMix64 seeded with 0.
  EXPECT_EQ(mix64(0), 0xE220A8397B1DCDAFull);
  EXPECT_EQ(mix64(0x9E3779B97F4A7C15ull), 0x6E789E6AA1B965F4ull);
}

TEST(Rng, MomentsOfSamplers) {
  Rng rng = make_rng(11, Stream::kInstance);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0, sl = 0, sl2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = uniform01(rng);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    const double z = standard_normal(rng);
    sn += z;
    sn2 += z * z;
    const double l = unit_laplace(rng);
    sl += l;
    sl2 += l * l;
  }
  EXPECT_NEAR(su / n, 0.5, 0.005);
  EXPECT_NEAR(sn / n, 0.0, 0.01);
  EXPECT_NEAR(sn2 / n, 1.0, 0.02);
  EXPECT_NEAR(sl / n, 0.0, 0.02);
  EXPECT_NEAR(sl2 / n, 2.0, 0.06);
}

}  // namespace
}  // namespace regmarket
