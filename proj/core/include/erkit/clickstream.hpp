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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace erkit {

// One search impression: the (normalized) query, the entities shown in
// order, and at most one clicked entity.
struct ClickEvent {
  std::string query;
  std::vector<std::string> impressions;
  std::optional<std::string> clicked;
  std::optional<std::int64_t> timestamp_ms;

  friend bool operator==(const ClickEvent&, const ClickEvent&) = default;
};

// Aggregated counts for one (query, entity) pair. ctr == nclick / nimp.
struct CtrRecord {
  std::string query;
  std::string entity_id;
  std::uint64_t nimp = 0;
  std::uint64_t nclick = 0;
  double ctr = 0.0;

  friend bool operator==(const CtrRecord&, const CtrRecord&) = default;
};

struct CtrFilter {
  std::uint64_t min_impressions = 25;
  double min_ctr = 0.3;

  void validate() const;
};

struct EventParseResult {
  std::vector<ClickEvent> events;
  std::size_t lines = 0;
  std::size_t rejects = 0;
};

// Parses one JSONL event line ({"query", "impressions", "clicked", "ts"}).
// Returns nullopt for malformed lines, empty impression lists and clicks on
// entities that were not shown.
std::optional<ClickEvent> parse_event_line(std::string_view line);

// Reads a JSONL event log in file order. Blank lines are ignored. In strict
// mode the first rejected line raises IngestError with its line number.
EventParseResult parse_events(const std::filesystem::path& path,
                              bool strict = false);

std::string event_to_json(const ClickEvent& event);
void write_events_jsonl(std::span<const ClickEvent> events,
                        const std::filesystem::path& path);

// nclick / nimp. DomainError when nimp == 0 or nclick > nimp.
double compute_ctr(std::uint64_t nclick, std::uint64_t nimp);

// Running (nimp, nclick) tallies per (query, entity). Merging two aggregators
// is exact addition, so shards can be aggregated independently.
class CtrAggregator {
 public:
  void add(const ClickEvent& event);
  void merge(const CtrAggregator& other);

  // Sorted by (query, entity_id).
  std::vector<CtrRecord> records() const;
  std::size_t pair_count() const { return pairs_; }

 private:
  struct Counts {
    std::uint64_t nimp = 0;
    std::uint64_t nclick = 0;
  };
  using EntityCounts = std::map<std::string, Counts, std::less<>>;
  Counts& slot(EntityCounts& entities, std::string_view entity_id);

  std::map<std::string, EntityCounts, std::less<>> counts_;  // query -> entity
  std::size_t pairs_ = 0;
};

std::vector<CtrRecord> aggregate_pairs(std::span<const ClickEvent> events);

// Splits the events into `shards` contiguous slices, aggregates each on up to
// `threads` workers and merges the partial counts. Output is identical to
// aggregate_pairs for any shard or thread count.
std::vector<CtrRecord> aggregate_pairs_sharded(std::span<const ClickEvent> events,
                                               std::size_t shards,
                                               unsigned threads);

struct FilterResult {
  std::vector<CtrRecord> records;
  std::size_t kept = 0;
  std::size_t dropped = 0;
};

// Keeps records with nimp >= min_impressions and ctr >= min_ctr, in order.
FilterResult filter_records(std::span<const CtrRecord> records,
                            const CtrFilter& filter);

void write_ctr_jsonl(std::span<const CtrRecord> records,
                     const std::filesystem::path& path);
std::vector<CtrRecord> read_ctr_jsonl(const std::filesystem::path& path);

}  // namespace erkit
