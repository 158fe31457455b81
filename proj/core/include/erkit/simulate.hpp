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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "erkit/catalog.hpp"
#include "erkit/clickstream.hpp"
#include "erkit/metrics.hpp"
#include "erkit/relevance.hpp"

namespace erkit {

// Seeded fixture generator. Every artifact is a pure function of the config;
// parallel stages draw from per-item streams derived with split_seed so the
// output does not depend on the thread count.
struct SimConfig {
  std::uint64_t seed = 42;
  std::size_t n_titles = 1000;
  std::size_t n_queries = 500;
  double typo_rate = 0.02;          // per-character edit probability
  double score_noise_sigma = 0.05;  // Gaussian noise on mock ER scores
  double t_high = 0.9;              // score >= t_high bins high
  double t_medium = 0.7;            // score >= t_medium bins medium
  std::size_t retrieve_m = 10;      // results returned per query
  double click_position_decay = 0.7;
  std::size_t replays = 200;        // impression events per query

  // Throws ConfigError when a field is out of range. Thresholds must satisfy
  // 1 >= t_high >= t_medium >= 0.
  void validate() const;
};

// SplitMix64 finalizer applied to (seed, stream): derives independent
// sub-seeds for catalog, query, ranking and click streams.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

// Portable random source: std::mt19937_64 (bit-exact by the standard) plus
// distributions implemented here, since the standard library's distributions
// are implementation-defined.
class SimRng {
 public:
  explicit SimRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();                       // [0, 1)
  std::uint64_t uniform_int(std::uint64_t n);  // [0, n), unbiased
  double normal();                        // Box-Muller, mean 0, sd 1

 private:
  std::mt19937_64 engine_;
};

struct SimQuery {
  std::string query;
  std::string true_entity_id;

  friend bool operator==(const SimQuery&, const SimQuery&) = default;
};

// Titles tt0000001.. with pronounceable lowercase names (unique), release
// years uniform in [1950, 2024], log-normal rating counts and rank = ordinal
// of rating count descending.
Catalog gen_catalog(const SimConfig& config);

// Applies per-character substitute / delete / duplicate edits at `rate` and
// normalizes the result. Never returns an empty string.
std::string apply_typos(std::string_view name, double rate, SimRng& rng);

// Title-only queries for min(n_queries, n_titles) distinct titles, drawn
// without replacement. Query strings are unique; a title whose noisy query
// collides with an earlier one is skipped in favor of the next title.
std::vector<SimQuery> gen_queries(const Catalog& catalog, const SimConfig& config);

// Mock ER: scores every title by edit similarity to the query plus seeded
// Gaussian noise (clamped to [0, 1]), keeps the top retrieve_m by score
// (ties by entity_id) and bins by the configured thresholds.
std::vector<RunResult> run_mock_er(const Catalog& catalog,
                                   std::span<const SimQuery> queries,
                                   const SimConfig& config, unsigned threads = 1);

// Replays each run result `replays` times. The true entity at 1-based
// position p is clicked with probability decay^(p-1); nothing else is ever
// clicked.
std::vector<ClickEvent> gen_clicklog(std::span<const RunResult> run,
                                     std::span<const SimQuery> truth,
                                     const SimConfig& config);

// query -> {true entity}.
RelevanceSet truth_relevance(std::span<const SimQuery> queries);

struct Simulation {
  Catalog catalog;
  std::vector<SimQuery> queries;
  std::vector<RunResult> run;
  std::vector<ClickEvent> events;
};

Simulation simulate(const SimConfig& config, unsigned threads = 1);

// Writes basics.tsv, ratings.tsv, ranks.tsv, truth.jsonl, run.jsonl and
// events.jsonl into dir (created if needed).
void write_simulation(const Simulation& sim, const std::filesystem::path& dir);

void write_truth_jsonl(std::span<const SimQuery> queries,
                       const std::filesystem::path& path);
std::vector<SimQuery> read_truth_jsonl(const std::filesystem::path& path);

}  // namespace erkit
