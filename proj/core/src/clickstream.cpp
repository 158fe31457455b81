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

#include "erkit/clickstream.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <unordered_set>

#include "erkit/error.hpp"
#include "erkit/parallel.hpp"
#include "erkit/text.hpp"
#include "jsonl.hpp"

namespace erkit {

void CtrFilter::validate() const {
  if (min_impressions < 1) throw ConfigError("min_impressions must be >= 1");
  if (!(min_ctr >= 0.0 && min_ctr <= 1.0)) {
    throw ConfigError("min_ctr must lie in [0, 1]");
  }
}

std::optional<ClickEvent> parse_event_line(std::string_view line) {
  const auto obj = detail::Json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (!obj.is_object()) return std::nullopt;

  const auto query = obj.find("query");
  const auto impressions = obj.find("impressions");
  if (query == obj.end() || !query->is_string()) return std::nullopt;
  if (impressions == obj.end() || !impressions->is_array()) return std::nullopt;

  ClickEvent event;
  event.query = normalize_query(query->get_ref<const std::string&>());
  if (event.query.empty()) return std::nullopt;
  for (const auto& item : *impressions) {
    if (!item.is_string() || item.get_ref<const std::string&>().empty()) {
      return std::nullopt;
    }
    event.impressions.push_back(item.get<std::string>());
  }
  if (event.impressions.empty()) return std::nullopt;

  if (const auto clicked = obj.find("clicked"); clicked != obj.end()) {
    if (clicked->is_string()) {
      event.clicked = clicked->get<std::string>();
      if (std::find(event.impressions.begin(), event.impressions.end(),
                    *event.clicked) == event.impressions.end()) {
        return std::nullopt;
      }
    } else if (!clicked->is_null()) {
      return std::nullopt;
    }
  }
  if (const auto ts = obj.find("ts"); ts != obj.end()) {
    if (ts->is_number_integer()) {
      event.timestamp_ms = ts->get<std::int64_t>();
    } else if (!ts->is_null()) {
      return std::nullopt;
    }
  }
  return event;
}

EventParseResult parse_events(const std::filesystem::path& path, bool strict) {
  EventParseResult result;
  detail::for_each_line(path, [&](std::string_view line, std::size_t number) {
    if (line.find_first_not_of(" \t") == std::string_view::npos) return;
    ++result.lines;
    auto event = parse_event_line(line);
    if (!event) {
      if (strict) {
        throw IngestError(
            fmt::format("{}:{}: rejected click event", path.string(), number));
      }
      ++result.rejects;
      return;
    }
    result.events.push_back(std::move(*event));
  });
  return result;
}

std::string event_to_json(const ClickEvent& event) {
  detail::OrderedJson obj;
  obj["query"] = event.query;
  obj["impressions"] = event.impressions;
  obj["clicked"] = event.clicked ? detail::OrderedJson(*event.clicked)
                                 : detail::OrderedJson(nullptr);
  obj["ts"] = event.timestamp_ms ? detail::OrderedJson(*event.timestamp_ms)
                                 : detail::OrderedJson(nullptr);
  return detail::dump_line(obj);
}

void write_events_jsonl(std::span<const ClickEvent> events,
                        const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  for (const auto& e : events) out << event_to_json(e) << '\n';
  detail::finish_output(out, path);
}

double compute_ctr(std::uint64_t nclick, std::uint64_t nimp) {
  if (nimp == 0) throw DomainError("CTR undefined for zero impressions");
  if (nclick > nimp) {
    throw DomainError(
        fmt::format("clicks ({}) exceed impressions ({})", nclick, nimp));
  }
  return static_cast<double>(nclick) / static_cast<double>(nimp);
}

CtrAggregator::Counts& CtrAggregator::slot(EntityCounts& entities,
                                           std::string_view entity_id) {
  auto it = entities.find(entity_id);
  if (it == entities.end()) {
    it = entities.emplace(std::string(entity_id), Counts{}).first;
    ++pairs_;
  }
  return it->second;
}

void CtrAggregator::add(const ClickEvent& event) {
  auto query = counts_.find(event.query);
  if (query == counts_.end()) query = counts_.emplace(event.query, EntityCounts{}).first;
  auto& entities = query->second;

  // An entity shown twice in one event still counts as one impression.
  const auto& shown = event.impressions;
  std::unordered_set<std::string_view> seen;
  const bool small = shown.size() <= 32;
  for (std::size_t i = 0; i < shown.size(); ++i) {
    const std::string_view entity = shown[i];
    if (small) {
      if (std::find(shown.begin(), shown.begin() + static_cast<std::ptrdiff_t>(i),
                    shown[i]) != shown.begin() + static_cast<std::ptrdiff_t>(i)) {
        continue;
      }
    } else if (!seen.insert(entity).second) {
      continue;
    }
    auto& counts = slot(entities, entity);
    ++counts.nimp;
    if (event.clicked && *event.clicked == entity) ++counts.nclick;
  }
}

void CtrAggregator::merge(const CtrAggregator& other) {
  for (const auto& [query, entities] : other.counts_) {
    auto mine = counts_.find(query);
    if (mine == counts_.end()) mine = counts_.emplace(query, EntityCounts{}).first;
    for (const auto& [entity, counts] : entities) {
      auto& total = slot(mine->second, entity);
      total.nimp += counts.nimp;
      total.nclick += counts.nclick;
    }
  }
}

std::vector<CtrRecord> CtrAggregator::records() const {
  std::vector<CtrRecord> out;
  out.reserve(pairs_);
  for (const auto& [query, entities] : counts_) {
    for (const auto& [entity, counts] : entities) {
      out.push_back({query, entity, counts.nimp, counts.nclick,
                     compute_ctr(counts.nclick, counts.nimp)});
    }
  }
  return out;
}

std::vector<CtrRecord> aggregate_pairs(std::span<const ClickEvent> events) {
  CtrAggregator agg;
  for (const auto& e : events) agg.add(e);
  return agg.records();
}

std::vector<CtrRecord> aggregate_pairs_sharded(std::span<const ClickEvent> events,
                                               std::size_t shards,
                                               unsigned threads) {
  shards = std::max<std::size_t>(1, shards);
  std::vector<CtrAggregator> partial(shards);
  const std::size_t per_shard = (events.size() + shards - 1) / shards;
  parallel_for_chunks(shards, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      const std::size_t lo = std::min(events.size(), s * per_shard);
      const std::size_t hi = std::min(events.size(), lo + per_shard);
      for (std::size_t i = lo; i < hi; ++i) partial[s].add(events[i]);
    }
  });
  CtrAggregator total;
  for (const auto& p : partial) total.merge(p);
  return total.records();
}

FilterResult filter_records(std::span<const CtrRecord> records,
                            const CtrFilter& filter) {
  FilterResult result;
  for (const auto& r : records) {
    if (r.nimp >= filter.min_impressions && r.ctr >= filter.min_ctr) {
      result.records.push_back(r);
    }
  }
  result.kept = result.records.size();
  result.dropped = records.size() - result.kept;
  return result;
}

void write_ctr_jsonl(std::span<const CtrRecord> records,
                     const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  for (const auto& r : records) {
    detail::OrderedJson obj;
    obj["query"] = r.query;
    obj["entity_id"] = r.entity_id;
    obj["nimp"] = r.nimp;
    obj["nclick"] = r.nclick;
    obj["ctr"] = r.ctr;
    out << detail::dump_line(obj) << '\n';
  }
  detail::finish_output(out, path);
}

std::vector<CtrRecord> read_ctr_jsonl(const std::filesystem::path& path) {
  std::vector<CtrRecord> records;
  detail::for_each_line(path, [&](std::string_view line, std::size_t number) {
    if (line.empty()) return;
    try {
      const auto obj = detail::Json::parse(line);
      CtrRecord r;
      r.query = obj.at("query").get<std::string>();
      r.entity_id = obj.at("entity_id").get<std::string>();
      r.nimp = obj.at("nimp").get<std::uint64_t>();
      r.nclick = obj.at("nclick").get<std::uint64_t>();
      // ctr is always nclick / nimp; the stored value is ignored.
      r.ctr = compute_ctr(r.nclick, r.nimp);
      records.push_back(std::move(r));
    } catch (const detail::Json::exception& e) {
      throw IngestError(fmt::format("{}:{}: {}", path.string(), number, e.what()));
    } catch (const DomainError& e) {
      throw IngestError(fmt::format("{}:{}: {}", path.string(), number, e.what()));
    }
  });
  return records;
}

}  // namespace erkit
