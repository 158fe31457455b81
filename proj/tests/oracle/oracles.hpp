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

#pragma once

// Reference implementations used only by tests. They share no code with the
// library and favour the most literal reading of each definition.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "erkit/metrics.hpp"

namespace erkit::oracle {

struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 0;  // 0: undefined
};

inline bool same_ratio(const Ratio& want, const Fraction& got) {
  if (want.den == 0 || got.den == 0) return want.den == 0 && got.den == 0;
  return want.num * static_cast<std::int64_t>(got.den) ==
         static_cast<std::int64_t>(got.num) * want.den;
}

inline bool same_value(const Ratio& want, const std::optional<double>& got) {
  if (want.den == 0 || !got) return want.den == 0 && !got;
  const double v = static_cast<double>(want.num) / static_cast<double>(want.den);
  return std::abs(v - *got) < 1e-12;
}

// The retrieved set for (k, bin): ids at positions 1..k whose bin matches.
inline std::vector<std::string> retrieved_set(
    const std::vector<RankedEntity>& ranked, std::size_t k,
    std::optional<ConfidenceBin> bin) {
  std::vector<std::string> out;
  std::size_t position = 0;
  for (const auto& e : ranked) {
    ++position;
    if (position > k) break;
    if (bin && e.bin != *bin) continue;
    out.push_back(e.entity_id);
  }
  return out;
}

inline std::int64_t intersection_size(const std::vector<std::string>& a,
                                      const std::vector<std::string>& b) {
  std::int64_t n = 0;
  for (const auto& x : a) {
    for (const auto& y : b) {
      if (x == y) {
        ++n;
        break;
      }
    }
  }
  return n;
}

inline Ratio recall(const RelevantIds& relevant_set,
                    const std::vector<RankedEntity>& ranked, std::size_t k,
                    std::optional<ConfidenceBin> bin = std::nullopt) {
  const std::vector<std::string> relevant(relevant_set.begin(), relevant_set.end());
  const auto retrieved = retrieved_set(ranked, k, bin);
  return {intersection_size(relevant, retrieved),
          static_cast<std::int64_t>(relevant.size())};
}

inline Ratio precision(const RelevantIds& relevant_set,
                       const std::vector<RankedEntity>& ranked, std::size_t k,
                       std::optional<ConfidenceBin> bin = std::nullopt) {
  const std::vector<std::string> relevant(relevant_set.begin(), relevant_set.end());
  const auto retrieved = retrieved_set(ranked, k, bin);
  return {intersection_size(retrieved, relevant),
          static_cast<std::int64_t>(retrieved.size())};
}

// Plain recursive Levenshtein over suffixes with memoization.
class Levenshtein {
 public:
  Levenshtein(std::string a, std::string b) : a_(std::move(a)), b_(std::move(b)) {}

  std::size_t distance() { return solve(0, 0); }

 private:
  std::size_t solve(std::size_t i, std::size_t j) {
    if (i == a_.size()) return b_.size() - j;
    if (j == b_.size()) return a_.size() - i;
    const auto key = std::make_pair(i, j);
    if (const auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::size_t best;
    if (a_[i] == b_[j]) {
      best = solve(i + 1, j + 1);
    } else {
      best = 1 + std::min({solve(i + 1, j), solve(i, j + 1), solve(i + 1, j + 1)});
    }
    memo_[key] = best;
    return best;
  }

  std::string a_;
  std::string b_;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo_;
};

inline std::size_t levenshtein(const std::string& a, const std::string& b) {
  return Levenshtein(a, b).distance();
}

// Exact two-sided binomial acceptance region [lo, hi] holding at least
// `coverage` of the mass, from the summed probability mass function.
inline std::pair<std::uint64_t, std::uint64_t> binomial_interval(
    std::uint64_t n, double p, double coverage) {
  const double tail = (1.0 - coverage) / 2.0;
  std::vector<long double> pmf(n + 1);
  for (std::uint64_t x = 0; x <= n; ++x) {
    const long double log_choose = std::lgamma(static_cast<long double>(n) + 1) -
                                   std::lgamma(static_cast<long double>(x) + 1) -
                                   std::lgamma(static_cast<long double>(n - x) + 1);
    pmf[x] = std::exp(log_choose + x * std::log(static_cast<long double>(p)) +
                      (n - x) * std::log1p(-static_cast<long double>(p)));
  }
  std::uint64_t lo = 0;
  long double cdf = 0;
  for (std::uint64_t x = 0; x <= n; ++x) {
    cdf += pmf[x];
    if (cdf > tail) {
      lo = x;
      break;
    }
  }
  std::uint64_t hi = n;
  long double upper = 0;
  for (std::uint64_t x = n + 1; x-- > 0;) {
    upper += pmf[x];
    if (upper > tail) {
      hi = x;
      break;
    }
  }
  return {lo, hi};
}

// Small random metric instance: up to 8 ranked items drawn from a pool of 10
// ids, up to 4 relevant ids from the same pool, k in {1, 3, 5}.
struct Instance {
  RelevantIds relevant;
  std::vector<RankedEntity> ranked;
  std::size_t k = 1;
};

inline Instance random_instance(std::mt19937_64& rng, bool single_relevant = false) {
  static const std::size_t kChoices[] = {1, 3, 5};
  std::vector<std::string> pool;
  for (int i = 0; i < 10; ++i) pool.push_back("e" + std::to_string(i));
  std::shuffle(pool.begin(), pool.end(), rng);

  Instance inst;
  inst.k = kChoices[std::uniform_int_distribution<int>(0, 2)(rng)];
  const auto n_ranked = std::uniform_int_distribution<std::size_t>(0, 8)(rng);
  std::uniform_int_distribution<int> bin_dist(0, 2);
  for (std::size_t i = 0; i < n_ranked; ++i) {
    inst.ranked.push_back({pool[i], 1.0 - 0.1 * static_cast<double>(i),
                           static_cast<ConfidenceBin>(bin_dist(rng))});
  }
  std::shuffle(pool.begin(), pool.end(), rng);
  const std::size_t n_relevant =
      single_relevant ? 1 : std::uniform_int_distribution<std::size_t>(0, 4)(rng);
  for (std::size_t i = 0; i < n_relevant; ++i) inst.relevant.insert(pool[i]);
  return inst;
}

}  // namespace erkit::oracle
