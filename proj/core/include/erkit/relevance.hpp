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
#include <set>
#include <span>
#include <string>
#include <vector>

#include "erkit/clickstream.hpp"
#include "erkit/importance.hpp"

namespace erkit {

// Why a (query, entity) pair made it into the relevance set.
struct RelevanceProvenance {
  std::string query;
  std::string entity_id;
  double ctr = 0.0;
  std::uint64_t nimp = 0;
  double importance = 0.0;

  friend bool operator==(const RelevanceProvenance&,
                         const RelevanceProvenance&) = default;
};

// Binary relevance judgments (qrels): query -> nonempty set of entity ids.
struct RelevanceSet {
  std::map<std::string, std::set<std::string>> entries;
  // Sorted by (query, entity_id); empty when loaded from qrels alone.
  std::vector<RelevanceProvenance> provenance;

  std::size_t pair_count() const;
  const std::set<std::string>* find(const std::string& query) const;
};

struct MergeResult {
  RelevanceSet relevance;
  std::size_t dropped_unknown_entity = 0;
  std::size_t dropped_low_importance = 0;
};

// Joins filtered CTR pairs with scored titles: a pair is kept iff its entity
// was scored with importance >= min_importance. Pairs whose entity is not
// among the scored titles are dropped and tallied.
MergeResult merge_relevance(std::span<const CtrRecord> ctr_records,
                            std::span<const ScoredTitle> scored,
                            double min_importance);

// One line per query: {"query", "relevant": [sorted ids]}.
void emit_qrels(const RelevanceSet& relevance, const std::filesystem::path& path);
// Sidecar: {"query", "entity_id", "ctr", "nimp", "importance"} per pair.
void emit_provenance(const RelevanceSet& relevance,
                     const std::filesystem::path& path);

// Loader for emit_qrels output. Queries are normalized on load; duplicate
// queries or empty relevant lists raise IngestError.
RelevanceSet load_qrels(const std::filesystem::path& path);

}  // namespace erkit
