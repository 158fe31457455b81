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

#include "erkit/relevance.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <tuple>
#include <unordered_map>

#include "erkit/error.hpp"
#include "erkit/text.hpp"
#include "jsonl.hpp"

namespace erkit {

std::size_t RelevanceSet::pair_count() const {
  std::size_t n = 0;
  for (const auto& [query, ids] : entries) n += ids.size();
  return n;
}

const std::set<std::string>* RelevanceSet::find(const std::string& query) const {
  const auto it = entries.find(query);
  return it == entries.end() ? nullptr : &it->second;
}

MergeResult merge_relevance(std::span<const CtrRecord> ctr_records,
                            std::span<const ScoredTitle> scored,
                            double min_importance) {
  if (!(min_importance >= 0.0 && min_importance <= 1.0)) {
    throw ConfigError("min_importance must lie in [0, 1]");
  }
  std::unordered_map<std::string_view, double> importance;
  importance.reserve(scored.size());
  for (const auto& s : scored) importance.emplace(s.entity_id, s.importance);

  MergeResult result;
  auto& prov = result.relevance.provenance;
  for (const auto& r : ctr_records) {
    const auto it = importance.find(r.entity_id);
    if (it == importance.end()) {
      ++result.dropped_unknown_entity;
      continue;
    }
    if (it->second < min_importance) {
      ++result.dropped_low_importance;
      continue;
    }
    if (result.relevance.entries[r.query].insert(r.entity_id).second) {
      prov.push_back({r.query, r.entity_id, r.ctr, r.nimp, it->second});
    }
  }
  std::sort(prov.begin(), prov.end(), [](const auto& a, const auto& b) {
    return std::tie(a.query, a.entity_id) < std::tie(b.query, b.entity_id);
  });
  return result;
}

void emit_qrels(const RelevanceSet& relevance, const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  for (const auto& [query, ids] : relevance.entries) {
    detail::OrderedJson obj;
    obj["query"] = query;
    obj["relevant"] = std::vector<std::string>(ids.begin(), ids.end());
    out << detail::dump_line(obj) << '\n';
  }
  detail::finish_output(out, path);
}

void emit_provenance(const RelevanceSet& relevance,
                     const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  for (const auto& p : relevance.provenance) {
    detail::OrderedJson obj;
    obj["query"] = p.query;
    obj["entity_id"] = p.entity_id;
    obj["ctr"] = p.ctr;
    obj["nimp"] = p.nimp;
    obj["importance"] = p.importance;
    out << detail::dump_line(obj) << '\n';
  }
  detail::finish_output(out, path);
}

RelevanceSet load_qrels(const std::filesystem::path& path) {
  RelevanceSet relevance;
  detail::for_each_line(path, [&](std::string_view line, std::size_t number) {
    if (line.empty()) return;
    const auto fail = [&](const std::string& what) {
      return IngestError(fmt::format("{}:{}: {}", path.string(), number, what));
    };
    std::string query;
    std::set<std::string> ids;
    try {
      const auto obj = detail::Json::parse(line);
      query = normalize_query(obj.at("query").get<std::string>());
      for (const auto& id : obj.at("relevant")) ids.insert(id.get<std::string>());
    } catch (const detail::Json::exception& e) {
      throw fail(e.what());
    }
    if (query.empty()) throw fail("empty query");
    if (ids.empty()) throw fail("empty relevant list for query: " + query);
    if (!relevance.entries.emplace(query, std::move(ids)).second) {
      throw fail("duplicate query: " + query);
    }
  });
  return relevance;
}

}  // namespace erkit
