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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "erkit/metrics.hpp"

namespace erkit {

// Root-cause bucket for one query, checked in this order:
//   success         a relevant entity is in the top k at or above the target bin
//   binning_miss    a relevant entity is in the top k, but only below the target bin
//   ranking_miss    a relevant entity was retrieved, but not in the top k
//   retrieval_miss  no relevant entity was retrieved at all
enum class Category { kSuccess, kBinningMiss, kRankingMiss, kRetrievalMiss };

inline constexpr std::array<Category, 4> kAllCategories = {
    Category::kSuccess, Category::kBinningMiss, Category::kRankingMiss,
    Category::kRetrievalMiss};

std::string_view to_string(Category category);

struct Diagnosis {
  std::string query;
  Category category = Category::kRetrievalMiss;
  // Lowest-ranked (best) relevant hit anywhere in the retrieved list, 1-based.
  std::optional<std::size_t> best_rank;
  std::optional<ConfidenceBin> best_bin;
};

// DomainError on an empty relevant set or k == 0.
Diagnosis classify_query(const RelevantIds& relevant, const RunResult& run,
                         std::size_t k,
                         ConfidenceBin target_bin = ConfidenceBin::kHigh);

struct DiagnosisSummary {
  std::size_t k = 5;
  ConfidenceBin target_bin = ConfidenceBin::kHigh;
  std::vector<Diagnosis> diagnoses;  // sorted by query
  std::array<std::size_t, 4> counts{};  // indexed by Category
  // Relevant entities found in the top k, by the bin they carried.
  std::size_t hits_high = 0;
  std::size_t hits_medium = 0;
  std::size_t hits_low = 0;
  // Independent cross-check: share of queries with any relevant entity in the
  // top k at >= target bin, computed straight from the run.
  double hit_rate = 0.0;

  std::size_t queries() const { return diagnoses.size(); }
  std::size_t count(Category c) const { return counts[static_cast<std::size_t>(c)]; }
  double fraction(Category c) const;
  bool consistent() const { return fraction(Category::kSuccess) == hit_rate; }
};

// Classifies every qrels query; queries missing from the run are
// retrieval misses.
DiagnosisSummary diagnose_run(const RelevanceSet& qrels,
                              std::span<const RunResult> run, std::size_t k,
                              ConfidenceBin target_bin = ConfidenceBin::kHigh);

// {"query","category","best_rank","best_bin"} per line.
void write_diagnoses_jsonl(const DiagnosisSummary& summary,
                           const std::filesystem::path& path);
std::string summary_to_json(const DiagnosisSummary& summary, int indent = 2);

// One compared column of two reports.
struct DeltaRow {
  std::string metric;
  AggregateMode mode = AggregateMode::kMacro;
  std::optional<double> baseline;
  std::optional<double> candidate;
  // Percentage points, candidate - baseline. Absent when either side is.
  std::optional<double> absolute_pp;
  // Percent change relative to baseline. Also absent for a zero baseline.
  std::optional<double> relative_pct;

  bool comparable() const { return baseline && candidate; }
};

struct DeltaReport {
  std::size_t k = 5;
  // Headline columns come first: recall@k@high,
  // precision@k@high, precision@1@high. Then every other metric.
  std::vector<DeltaRow> rows;
};

// ConfigError when k or the bin set differ between the reports.
DeltaReport compare_reports(const MetricsReport& baseline,
                            const MetricsReport& candidate);

// "+10.00%" / "-0.89%"; zero renders with "+".
std::string format_signed_percent(double value);
// "+5.00pp".
std::string format_signed_pp(double value);

std::string delta_to_json(const DeltaReport& delta, int indent = 2);

// Full aligned table: metric, mode, baseline, candidate, abs, rel.
std::string render_delta_table(const DeltaReport& delta);
// Compact headline layout, one row per aggregation mode with the relative
// deltas of the three headline columns.
std::string render_headline_table(const DeltaReport& delta,
                                  std::string_view label = "candidate");

}  // namespace erkit
