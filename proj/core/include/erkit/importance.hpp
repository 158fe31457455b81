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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "erkit/catalog.hpp"

namespace erkit {

// Normalized popularity components, each in [0, 1].
struct ComponentScores {
  double release_year = 0.0;
  double rank = 0.0;
  double rating_count = 0.0;
};

// Coefficients of the linear importance combiner. Must lie on the simplex.
struct ImportanceWeights {
  double release_year = 1.0 / 3.0;
  double rank = 1.0 / 3.0;
  double rating_count = 1.0 / 3.0;
};

enum class MissingFeaturePolicy { kDefaultScore, kExcludeTitle };

// Fixed normalization window. The lower rating-count bound is fixed at 1
// on the log scale.
struct NormalizationBounds {
  double min_year = 1870;
  double max_year = 2100;
  double min_rank = 1;
  double max_rank = 1e6;
  double max_rating_count = 1e7;
};

struct ImportanceConfig {
  ImportanceWeights weights;
  MissingFeaturePolicy missing_feature_policy = MissingFeaturePolicy::kDefaultScore;
  double default_component_score = 0.5;
  // nullopt: fit min/max of each feature from the catalog being scored.
  std::optional<NormalizationBounds> bounds;

  // Throws ConfigError on negative weights, weights not summing to 1
  // (within 1e-9), a default score outside [0, 1] or inverted fixed bounds.
  void validate() const;
};

struct ScoredTitle {
  std::string entity_id;
  ComponentScores components;
  double importance = 0.0;
};

struct ScoreCatalogResult {
  std::vector<ScoredTitle> scored;  // ordered by entity_id
  std::size_t excluded = 0;         // dropped by kExcludeTitle
  std::size_t defaulted = 0;        // titles with at least one default component
  NormalizationBounds bounds_used;
  double min_rating_count_used = 1.0;
};

// clamp((x - lo) / (hi - lo), 0, 1). ConfigError when lo >= hi.
double linear_score(double x, double lo, double hi);

// clamp((ln x - ln lo) / (ln hi - ln lo), 0, 1), or 1 minus that when invert
// is set (ranks: lower is better). DomainError on nonpositive arguments,
// ConfigError when lo >= hi.
double log_scale_score(double x, double lo, double hi, bool invert);

double importance_score(const ComponentScores& components,
                        const ImportanceConfig& config);

// Scores every title in the catalog. Under fitted bounds a feature whose
// observed range collapses to a single value scores 1.0 for every title.
// Rating counts of zero score 0.0 (they sit below any positive log bound).
ScoreCatalogResult score_catalog(const Catalog& catalog,
                                 const ImportanceConfig& config,
                                 unsigned threads = 1);

// JSONL with entity_id, release_year_score, rank_score, rating_count_score,
// importance.
void write_scored_jsonl(const std::vector<ScoredTitle>& scored,
                        const std::filesystem::path& path);
std::vector<ScoredTitle> read_scored_jsonl(const std::filesystem::path& path);

}  // namespace erkit
