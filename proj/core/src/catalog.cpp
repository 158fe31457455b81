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

#include "erkit/catalog.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <numeric>
#include <unordered_set>

#include "erkit/error.hpp"
#include "jsonl.hpp"

namespace erkit {

namespace {

constexpr std::string_view kAbsent = "\\N";

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

template <typename Int>
std::optional<Int> parse_int(std::string_view cell) {
  Int value{};
  const auto [ptr, ec] =
      std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
  return value;
}

std::optional<double> parse_double(std::string_view cell) {
  double value{};
  const auto [ptr, ec] =
      std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
  return value;
}

// Header-driven TSV reader: resolves the named columns once, then hands each
// data row to a callback as the selected cells (in the order requested).
class TsvTable {
 public:
  TsvTable(std::filesystem::path path, std::vector<std::string> columns)
      : path_(std::move(path)), columns_(std::move(columns)) {}

  // fn returns false to mark the row as malformed.
  template <typename Fn>
  void rows(std::size_t& row_count, std::size_t& rejects, bool strict,
            Fn&& fn) const {
    std::vector<std::size_t> positions;
    std::size_t width = 0;
    bool saw_header = false;
    detail::for_each_line(path_, [&](std::string_view line, std::size_t number) {
      if (number == 1) {
        saw_header = true;
        const auto header = split_tabs(line);
        width = header.size();
        for (const auto& name : columns_) {
          const auto it = std::find(header.begin(), header.end(), name);
          if (it == header.end()) {
            throw IngestError(fmt::format("{}: missing column '{}'",
                                          path_.string(), name));
          }
          positions.push_back(static_cast<std::size_t>(it - header.begin()));
        }
        return;
      }
      if (line.empty()) return;
      ++row_count;
      const auto cells = split_tabs(line);
      bool ok = cells.size() == width;
      if (ok) {
        std::vector<std::string_view> selected;
        selected.reserve(positions.size());
        for (std::size_t p : positions) selected.push_back(cells[p]);
        ok = fn(selected);
      }
      if (!ok) {
        if (strict) {
          throw IngestError(
              fmt::format("{}:{}: malformed row", path_.string(), number));
        }
        ++rejects;
      }
    });
    if (!saw_header) {
      throw IngestError(path_.string() + ": missing header row");
    }
  }

 private:
  std::filesystem::path path_;
  std::vector<std::string> columns_;
};

}  // namespace

Catalog::Catalog(std::vector<Title> titles) : titles_(std::move(titles)) {
  index_.reserve(titles_.size());
  for (std::size_t i = 0; i < titles_.size(); ++i) {
    const auto& id = titles_[i].entity_id;
    if (id.empty()) throw IngestError("empty entity_id in catalog");
    if (!index_.emplace(id, i).second) {
      throw IngestError("duplicate entity_id: " + id);
    }
  }
}

const Title* Catalog::lookup(std::string_view entity_id) const {
  const auto it = index_.find(std::string(entity_id));
  return it == index_.end() ? nullptr : &titles_[it->second];
}

void assign_pseudo_ranks(std::vector<Title>& titles) {
  std::vector<std::size_t> order(titles.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ta = titles[a];
    const auto& tb = titles[b];
    if (ta.rating_count.has_value() != tb.rating_count.has_value()) {
      return ta.rating_count.has_value();
    }
    if (ta.rating_count && *ta.rating_count != *tb.rating_count) {
      return *ta.rating_count > *tb.rating_count;
    }
    return ta.entity_id < tb.entity_id;
  });
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    titles[order[pos]].rank = static_cast<std::int64_t>(pos + 1);
  }
}

CatalogParseResult parse_catalog(
    const std::filesystem::path& basics_path,
    const std::filesystem::path& ratings_path,
    const std::optional<std::filesystem::path>& ranks_path,
    const CatalogOptions& options) {
  CatalogStats stats;
  std::vector<Title> titles;
  std::unordered_map<std::string, std::size_t> index;

  TsvTable basics(basics_path, {"tconst", "primaryTitle", "startYear"});
  basics.rows(stats.basics_rows, stats.basics_rejects, options.strict,
              [&](const std::vector<std::string_view>& cells) {
                Title title;
                if (cells[0].empty() || cells[0] == kAbsent) return false;
                if (cells[1].empty() || cells[1] == kAbsent) return false;
                title.entity_id = std::string(cells[0]);
                title.name = std::string(cells[1]);
                if (cells[2] != kAbsent) {
                  const auto year = parse_int<int>(cells[2]);
                  if (!year || *year < options.min_year ||
                      *year > options.max_year) {
                    return false;
                  }
                  title.release_year = year;
                }
                if (!index.emplace(title.entity_id, titles.size()).second) {
                  throw IngestError(fmt::format("{}: duplicate entity_id: {}",
                                                basics_path.string(),
                                                title.entity_id));
                }
                titles.push_back(std::move(title));
                return true;
              });

  std::unordered_set<std::string> seen;
  TsvTable ratings(ratings_path, {"tconst", "averageRating", "numVotes"});
  ratings.rows(
      stats.ratings_rows, stats.ratings_rejects, options.strict,
      [&](const std::vector<std::string_view>& cells) {
        std::optional<double> rating;
        std::optional<std::int64_t> count;
        if (cells[1] != kAbsent) {
          rating = parse_double(cells[1]);
          if (!rating || *rating < 0.0 || *rating > 10.0) return false;
        }
        if (cells[2] != kAbsent) {
          count = parse_int<std::int64_t>(cells[2]);
          if (!count || *count < 0) return false;
        }
        const std::string id(cells[0]);
        if (!seen.insert(id).second) {
          throw IngestError(fmt::format("{}: duplicate entity_id: {}",
                                        ratings_path.string(), id));
        }
        const auto it = index.find(id);
        if (it == index.end()) {
          ++stats.ratings_orphans;
          return true;
        }
        titles[it->second].rating = rating;
        titles[it->second].rating_count = count;
        return true;
      });

  if (ranks_path) {
    seen.clear();
    TsvTable ranks(*ranks_path, {"tconst", "rank"});
    ranks.rows(stats.ranks_rows, stats.ranks_rejects, options.strict,
               [&](const std::vector<std::string_view>& cells) {
                 const auto rank = parse_int<std::int64_t>(cells[1]);
                 if (!rank || *rank < 1) return false;
                 const std::string id(cells[0]);
                 if (!seen.insert(id).second) {
                   throw IngestError(fmt::format("{}: duplicate entity_id: {}",
                                                 ranks_path->string(), id));
                 }
                 const auto it = index.find(id);
                 if (it == index.end()) {
                   ++stats.ranks_orphans;
                   return true;
                 }
                 titles[it->second].rank = rank;
                 return true;
               });
  } else {
    assign_pseudo_ranks(titles);
    stats.pseudo_rank = true;
  }

  return {Catalog(std::move(titles)), stats};
}

std::string title_to_json(const Title& title) {
  detail::OrderedJson obj;
  obj["entity_id"] = title.entity_id;
  obj["name"] = title.name;
  if (title.release_year) obj["release_year"] = *title.release_year;
  if (title.rank) obj["rank"] = *title.rank;
  if (title.rating_count) obj["rating_count"] = *title.rating_count;
  if (title.rating) obj["rating"] = *title.rating;
  return detail::dump_line(obj);
}

void write_catalog_jsonl(const Catalog& catalog,
                         const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  for (const auto& title : catalog.titles()) out << title_to_json(title) << '\n';
  detail::finish_output(out, path);
}

Catalog read_catalog_jsonl(const std::filesystem::path& path) {
  std::vector<Title> titles;
  detail::for_each_line(path, [&](std::string_view line, std::size_t number) {
    if (line.empty()) return;
    try {
      const auto obj = detail::Json::parse(line);
      Title title;
      title.entity_id = obj.at("entity_id").get<std::string>();
      title.name = obj.at("name").get<std::string>();
      if (obj.contains("release_year")) {
        title.release_year = obj["release_year"].get<int>();
      }
      if (obj.contains("rank")) title.rank = obj["rank"].get<std::int64_t>();
      if (obj.contains("rating_count")) {
        title.rating_count = obj["rating_count"].get<std::int64_t>();
      }
      if (obj.contains("rating")) title.rating = obj["rating"].get<double>();
      if (title.rank && *title.rank < 1) throw IngestError("rank < 1");
      if (title.rating_count && *title.rating_count < 0) {
        throw IngestError("rating_count < 0");
      }
      titles.push_back(std::move(title));
    } catch (const detail::Json::exception& e) {
      throw IngestError(fmt::format("{}:{}: {}", path.string(), number, e.what()));
    } catch (const IngestError& e) {
      throw IngestError(fmt::format("{}:{}: {}", path.string(), number, e.what()));
    }
  });
  return Catalog(std::move(titles));
}

void write_catalog_tsv(const Catalog& catalog,
                       const std::filesystem::path& basics_path,
                       const std::filesystem::path& ratings_path,
                       const std::optional<std::filesystem::path>& ranks_path) {
  auto basics = detail::open_output(basics_path);
  auto ratings = detail::open_output(ratings_path);
  basics << "tconst\tprimaryTitle\tstartYear\n";
  ratings << "tconst\taverageRating\tnumVotes\n";
  for (const auto& t : catalog.titles()) {
    basics << t.entity_id << '\t' << t.name << '\t'
           << (t.release_year ? std::to_string(*t.release_year)
                              : std::string(kAbsent))
           << '\n';
    if (t.rating || t.rating_count) {
      ratings << t.entity_id << '\t'
              << (t.rating ? fmt::format("{}", *t.rating) : std::string(kAbsent))
              << '\t'
              << (t.rating_count ? std::to_string(*t.rating_count)
                                 : std::string(kAbsent))
              << '\n';
    }
  }
  detail::finish_output(basics, basics_path);
  detail::finish_output(ratings, ratings_path);
  if (ranks_path) {
    auto ranks = detail::open_output(*ranks_path);
    ranks << "tconst\trank\n";
    for (const auto& t : catalog.titles()) {
      if (t.rank) ranks << t.entity_id << '\t' << *t.rank << '\n';
    }
    detail::finish_output(ranks, *ranks_path);
  }
}

}  // namespace erkit
