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
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace erkit {

// One catalog entity and its raw popularity signals.
struct Title {
  std::string entity_id;
  std::string name;
  std::optional<int> release_year;
  std::optional<std::int64_t> rank;  // 1 = most popular
  std::optional<std::int64_t> rating_count;
  std::optional<double> rating;

  friend bool operator==(const Title&, const Title&) = default;
};

struct CatalogOptions {
  bool strict = false;
  int min_year = 1870;
  int max_year = 2100;
};

// Row accounting for one ingest. basics_rows == titles + basics_rejects.
struct CatalogStats {
  std::size_t basics_rows = 0;
  std::size_t basics_rejects = 0;
  std::size_t ratings_rows = 0;
  std::size_t ratings_rejects = 0;
  std::size_t ratings_orphans = 0;
  std::size_t ranks_rows = 0;
  std::size_t ranks_rejects = 0;
  std::size_t ranks_orphans = 0;
  bool pseudo_rank = false;

  std::size_t total_rejects() const {
    return basics_rejects + ratings_rejects + ranks_rejects;
  }
};

// Immutable set of titles keyed by entity id, kept in insertion order.
class Catalog {
 public:
  Catalog() = default;

  // Throws IngestError naming the first duplicated or empty entity id.
  explicit Catalog(std::vector<Title> titles);

  const std::vector<Title>& titles() const { return titles_; }
  std::size_t size() const { return titles_.size(); }
  bool empty() const { return titles_.empty(); }

  // nullptr when the id is unknown.
  const Title* lookup(std::string_view entity_id) const;

 private:
  std::vector<Title> titles_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct CatalogParseResult {
  Catalog catalog;
  CatalogStats stats;
};

// Joins IMDb-style basics / ratings / (optional) ranks TSV dumps.
//
// Columns are located by header name: basics needs tconst, primaryTitle and
// startYear; ratings needs tconst, averageRating and numVotes; ranks needs
// tconst and rank. "\N" cells are absent values. Malformed rows are skipped
// and tallied unless options.strict is set, in which case the first one
// raises IngestError. Rows in ratings/ranks whose id is not in basics are
// ignored and tallied as orphans.
//
// Without a ranks file every title gets a pseudo-rank: the ordinal position
// under rating_count descending, ties by entity_id ascending. Titles lacking
// a rating count are placed after all titles that have one.
CatalogParseResult parse_catalog(
    const std::filesystem::path& basics_path,
    const std::filesystem::path& ratings_path,
    const std::optional<std::filesystem::path>& ranks_path,
    const CatalogOptions& options = {});

// Replaces every title's rank with the rating-count ordinal described above.
void assign_pseudo_ranks(std::vector<Title>& titles);

// Canonical JSONL: one object per title, absent fields omitted.
void write_catalog_jsonl(const Catalog& catalog,
                         const std::filesystem::path& path);
std::string title_to_json(const Title& title);
Catalog read_catalog_jsonl(const std::filesystem::path& path);

// Writes the three TSV dumps parse_catalog consumes. The ranks file is only
// written when ranks_path is given.
void write_catalog_tsv(const Catalog& catalog,
                       const std::filesystem::path& basics_path,
                       const std::filesystem::path& ratings_path,
                       const std::optional<std::filesystem::path>& ranks_path);

}  // namespace erkit
