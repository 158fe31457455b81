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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "erkit/relevance.hpp"

namespace erkit {

// Ranker confidence. Declared in ascending order so that the built-in
// comparison gives high > medium > low.
enum class ConfidenceBin : std::uint8_t { kLow = 0, kMedium = 1, kHigh = 2 };

inline constexpr std::array<ConfidenceBin, 3> kAllBins = {
    ConfidenceBin::kHigh, ConfidenceBin::kMedium, ConfidenceBin::kLow};

std::string_view to_string(ConfidenceBin bin);
std::optional<ConfidenceBin> parse_bin(std::string_view text);

struct RankedEntity {
  std::string entity_id;
  double score = 0.0;
  ConfidenceBin bin = ConfidenceBin::kLow;

  friend bool operator==(const RankedEntity&, const RankedEntity&) = default;
};

// One ER system answer: the full retrieved list in rank order.
struct RunResult {
  std::string query;
  std::vector<RankedEntity> ranked;

  friend bool operator==(const RunResult&, const RunResult&) = default;
};

using RelevantIds = std::set<std::string>;

// An exact ratio. den == 0 means the metric is undefined for this query.
struct Fraction {
  std::uint64_t num = 0;
  std::uint64_t den = 0;

  bool defined() const { return den != 0; }
  std::optional<double> value() const {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  }
  friend bool operator==(const Fraction&, const Fraction&) = default;
};

// Counting forms of the metrics. With bin set, only top-k results carrying
// that bin count as retrieved. k == 0 raises DomainError.
//   recall:    |relevant ∩ retrieved| / |relevant|
//   precision: |relevant ∩ retrieved| / |retrieved|
Fraction recall_fraction(const RelevantIds& relevant,
                         std::span<const RankedEntity> ranked, std::size_t k,
                         std::optional<ConfidenceBin> bin = std::nullopt);
Fraction precision_fraction(const RelevantIds& relevant,
                            std::span<const RankedEntity> ranked, std::size_t k,
                            std::optional<ConfidenceBin> bin = std::nullopt);

// Undefined (nullopt) when the denominator is empty.
std::optional<double> recall_at_k(const RelevantIds& relevant,
                                  std::span<const RankedEntity> ranked,
                                  std::size_t k);
std::optional<double> precision_at_k(const RelevantIds& relevant,
                                     std::span<const RankedEntity> ranked,
                                     std::size_t k);
std::optional<double> recall_at_k_bin(const RelevantIds& relevant,
                                      std::span<const RankedEntity> ranked,
                                      std::size_t k, ConfidenceBin bin);
std::optional<double> precision_at_k_bin(const RelevantIds& relevant,
                                         std::span<const RankedEntity> ranked,
                                         std::size_t k, ConfidenceBin bin);

enum class AggregateMode { kMicro, kMacro };

// macro: mean of defined per-query values. micro: sum of numerators over sum
// of denominators, restricted to defined queries. nullopt if nothing defined.
std::optional<double> aggregate(std::span<const Fraction> values,
                                AggregateMode mode);

enum class MetricKind { kPrecision, kRecall };

struct MetricId {
  MetricKind kind = MetricKind::kRecall;
  std::size_t k = 5;
  std::optional<ConfidenceBin> bin;

  // e.g. "recall@5", "precision@5@high".
  std::string name() const;
  friend bool operator==(const MetricId&, const MetricId&) = default;
};

// Report columns in canonical order: recall@k, precision@k, then recall and
// precision @k@bin for each requested bin, then precision@1@high.
std::vector<MetricId> report_metrics(std::size_t k,
                                     std::span<const ConfidenceBin> bins);

struct QueryMetrics {
  std::string query;
  bool in_run = true;
  std::vector<Fraction> values;  // parallel to MetricsReport::metrics
};

struct AggregateValue {
  std::optional<double> micro;
  std::optional<double> macro;
};

struct EvalCounts {
  std::size_t qrels_queries = 0;
  std::size_t evaluated = 0;
  std::size_t missing_from_run = 0;
  std::size_t run_without_qrels = 0;
};

struct MetricsReport {
  std::size_t k = 5;
  std::vector<ConfidenceBin> bins;
  std::vector<MetricId> metrics;
  std::vector<AggregateValue> aggregate;  // parallel to metrics
  std::vector<QueryMetrics> per_query;    // sorted by query
  EvalCounts counts;

  // nullptr when the report has no such column.
  const AggregateValue* find(std::string_view metric_name) const;
};

struct EvalOptions {
  std::size_t k = 5;
  std::vector<ConfidenceBin> bins{kAllBins.begin(), kAllBins.end()};
  unsigned threads = 1;
};

// Scores every qrels query against the run. Qrels queries absent from the
// run contribute recall 0 and undefined precision; run queries absent from
// the qrels are ignored. Both are counted. A query appearing twice in the run
// raises IngestError naming it.
MetricsReport evaluate_run(const RelevanceSet& qrels,
                           std::span<const RunResult> run,
                           const EvalOptions& options = {});

// Canonical report JSON with fixed key order.
std::string report_to_json(const MetricsReport& report, bool include_per_query,
                           int indent = 2);
// Reads the header, counts and aggregate section back; per-query detail is
// not restored.
MetricsReport report_from_json(std::string_view json);
MetricsReport read_report(const std::filesystem::path& path);

// Aligned "metric  micro  macro" text table.
std::string render_report_table(const MetricsReport& report);

bool scores_nonincreasing(const RunResult& run);

struct RunLoadResult {
  std::vector<RunResult> runs;
  std::size_t nonmonotone = 0;  // queries whose scores increase somewhere
};

// JSONL: {"query", "results": [{"entity_id", "score", "bin"}, ...]}. Queries
// are normalized on load. Duplicate queries, duplicate entities within a
// result list and unknown bins raise IngestError.
RunLoadResult load_run(const std::filesystem::path& path);
void write_run_jsonl(std::span<const RunResult> runs,
                     const std::filesystem::path& path);

}  // namespace erkit
