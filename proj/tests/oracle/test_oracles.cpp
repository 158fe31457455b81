// Copyright 2026 The er-evalkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <random>

#include "erkit/metrics.hpp"
#include "erkit/text.hpp"
#include "oracles.hpp"

namespace erkit {
namespace {

TEST(MetricOracle, AgreesOnRandomInstances) {
  std::mt19937_64 rng(20240611);
  for (int i = 0; i < 2000; ++i) {
    const auto inst = oracle::random_instance(rng);
    EXPECT_TRUE(oracle::same_ratio(oracle::recall(inst.relevant, inst.ranked, inst.k),
                                   recall_fraction(inst.relevant, inst.ranked, inst.k)));
    EXPECT_TRUE(oracle::same_ratio(oracle::precision(inst.relevant, inst.ranked, inst.k),
                                   precision_fraction(inst.relevant, inst.ranked, inst.k)));
    for (const auto bin : kAllBins) {
      EXPECT_TRUE(oracle::same_value(oracle::recall(inst.relevant, inst.ranked, inst.k, bin),
                                     recall_at_k_bin(inst.relevant, inst.ranked, inst.k, bin)));
      EXPECT_TRUE(
          oracle::same_value(oracle::precision(inst.relevant, inst.ranked, inst.k, bin),
                             precision_at_k_bin(inst.relevant, inst.ranked, inst.k, bin)));
    }
  }
}

TEST(LevenshteinOracle, AgreesWithEditDistance) {
  EXPECT_EQ(oracle::levenshtein("bridgerton", "bridgetown"), 2u);
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> len(0, 12);
  std::uniform_int_distribution<int> letter('a', 'd');
  for (int i = 0; i < 1000; ++i) {
    std::string a, b;
    for (int n = len(rng); n > 0; --n) a.push_back(static_cast<char>(letter(rng)));
    for (int n = len(rng); n > 0; --n) b.push_back(static_cast<char>(letter(rng)));
    ASSERT_EQ(edit_distance(a, b), oracle::levenshtein(a, b)) << a << " / " << b;
  }
}

TEST(BinomialOracle, Interval) {
  const auto [lo, hi] = oracle::binomial_interval(1000, 0.5, 0.99);
  EXPECT_EQ(lo + hi, 1000u);
  EXPECT_GE(lo, 455u);
  EXPECT_LE(lo, 462u);
  const auto [a, b] = oracle::binomial_interval(10, 1.0 - 1e-12, 0.99);
  EXPECT_EQ(a, 10u);
  EXPECT_EQ(b, 10u);
}

}  // namespace
}  // namespace erkit
