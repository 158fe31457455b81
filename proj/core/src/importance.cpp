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

#include "erkit/importance.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "erkit/error.hpp"
#include "erkit/parallel.hpp"
#include "jsonl.hpp"

namespace erkit {

namespace {

struct FeatureRange {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  bool seen = false;

  void add(double x) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
    seen = true;
  }
  bool degenerate() const { return lo == hi; }
};

// Normalization plan for one scoring pass, fixed before any title is scored.
struct Plan {
  double year_lo, year_hi;
  double rank_lo, rank_hi;
  double count_lo, count_hi;
  bool year_flat = false;
  bool rank_flat = false;
  bool count_flat = false;
};

Plan make_plan(const Catalog& catalog, const ImportanceConfig& config) {
  Plan plan{};
  if (config.bounds) {
    const auto& b = *config.bounds;
    plan.year_lo = b.min_year;
    plan.year_hi = b.max_year;
    plan.rank_lo = b.min_rank;
    plan.rank_hi = b.max_rank;
    plan.count_lo = 1.0;
    plan.count_hi = b.max_rating_count;
    return plan;
  }
  if (catalog.empty()) {
    throw ConfigError("cannot fit normalization bounds on an empty catalog");
  }
  FeatureRange year, rank, count;
  for (const auto& t : catalog.titles()) {
    if (t.release_year) year.add(*t.release_year);
    if (t.rank) rank.add(static_cast<double>(*t.rank));
    if (t.rating_count) count.add(static_cast<double>(*t.rating_count));
  }
  const auto require = [](const FeatureRange& r, const char* name) {
    if (!r.seen) {
      throw ConfigError(fmt::format(
          "cannot fit bounds: every title is missing {}", name));
    }
  };
  require(year, "release_year");
  require(rank, "rank");
  require(count, "rating_count");
  plan.year_lo = year.lo;
  plan.year_hi = year.hi;
  plan.year_flat = year.degenerate();
  plan.rank_lo = rank.lo;
  plan.rank_hi = rank.hi;
  plan.rank_flat = rank.degenerate();
  plan.count_lo = std::max(1.0, count.lo);
  plan.count_hi = count.hi;
  plan.count_flat = count.degenerate();
  return plan;
}

double score_year(const Plan& plan, double year) {
  if (plan.year_flat) return 1.0;
  return linear_score(year, plan.year_lo, plan.year_hi);
}

double score_rank(const Plan& plan, double rank) {
  if (plan.rank_flat) return 1.0;
  return log_scale_score(rank, plan.rank_lo, plan.rank_hi, /*invert=*/true);
}

double score_count(const Plan& plan, double count) {
  if (plan.count_flat) return 1.0;
  if (count <= 0.0) return 0.0;
  if (plan.count_lo >= plan.count_hi) return 1.0;
  return log_scale_score(count, plan.count_lo, plan.count_hi, /*invert=*/false);
}

}  // namespace

void ImportanceConfig::validate() const {
  const double w[] = {weights.release_year, weights.rank, weights.rating_count};
  for (double x : w) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw ConfigError("importance weights must be nonnegative");
    }
  }
  if (std::abs(w[0] + w[1] + w[2] - 1.0) > 1e-9) {
    throw ConfigError(fmt::format("importance weights must sum to 1 (got {})",
                                  w[0] + w[1] + w[2]));
  }
  if (!(default_component_score >= 0.0 && default_component_score <= 1.0)) {
    throw ConfigError("default component score must lie in [0, 1]");
  }
  if (bounds) {
    if (!(bounds->min_year < bounds->max_year)) {
      throw ConfigError("min_year must be below max_year");
    }
    if (!(bounds->min_rank > 0.0 && bounds->min_rank < bounds->max_rank)) {
      throw ConfigError("rank bounds must satisfy 0 < min_rank < max_rank");
    }
    if (!(bounds->max_rating_count > 1.0)) {
      throw ConfigError("max_rating_count must exceed 1");
    }
  }
}

double linear_score(double x, double lo, double hi) {
  if (!(lo < hi)) {
    throw ConfigError(fmt::format("linear_score requires lo < hi ({} >= {})", lo, hi));
  }
  return std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
}

double log_scale_score(double x, double lo, double hi, bool invert) {
  if (!(x > 0.0) || !(lo > 0.0) || !(hi > 0.0)) {
    throw DomainError(fmt::format(
        "log_scale_score requires positive arguments (x={}, lo={}, hi={})", x,
        lo, hi));
  }
  if (!(lo < hi)) {
    throw ConfigError(fmt::format("log_scale_score requires lo < hi ({} >= {})", lo, hi));
  }
  const double s = std::clamp(
      (std::log(x) - std::log(lo)) / (std::log(hi) - std::log(lo)), 0.0, 1.0);
  return invert ? 1.0 - s : s;
}

double importance_score(const ComponentScores& c, const ImportanceConfig& config) {
  const auto& w = config.weights;
  return w.release_year * c.release_year + w.rank * c.rank +
         w.rating_count * c.rating_count;
}

ScoreCatalogResult score_catalog(const Catalog& catalog,
                                 const ImportanceConfig& config,
                                 unsigned threads) {
  config.validate();
  const Plan plan = make_plan(catalog, config);

  const auto& titles = catalog.titles();
  const bool exclude =
      config.missing_feature_policy == MissingFeaturePolicy::kExcludeTitle;
  const double fallback = config.default_component_score;

  std::vector<std::optional<ScoredTitle>> slots(titles.size());
  parallel_for_chunks(titles.size(), threads,
                      [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Title& t = titles[i];
      const bool complete = t.release_year && t.rank && t.rating_count;
      if (!complete && exclude) continue;
      ScoredTitle s;
      s.entity_id = t.entity_id;
      s.components.release_year =
          t.release_year ? score_year(plan, *t.release_year) : fallback;
      s.components.rank =
          t.rank ? score_rank(plan, static_cast<double>(*t.rank)) : fallback;
      s.components.rating_count =
          t.rating_count ? score_count(plan, static_cast<double>(*t.rating_count))
                         : fallback;
      s.importance = importance_score(s.components, config);
      slots[i] = std::move(s);
    }
  });

  ScoreCatalogResult result;
  result.scored.reserve(titles.size());
  for (std::size_t i = 0; i < titles.size(); ++i) {
    const Title& t = titles[i];
    if (!slots[i]) {
      ++result.excluded;
      continue;
    }
    if (!(t.release_year && t.rank && t.rating_count)) ++result.defaulted;
    result.scored.push_back(std::move(*slots[i]));
  }
  std::sort(result.scored.begin(), result.scored.end(),
            [](const ScoredTitle& a, const ScoredTitle& b) {
              return a.entity_id < b.entity_id;
            });
  result.bounds_used = {plan.year_lo, plan.year_hi, plan.rank_lo, plan.rank_hi,
                        plan.count_hi};
  result.min_rating_count_used = plan.count_lo;
  return result;
}

void write_scored_jsonl(const std::vector<ScoredTitle>& scored,
                        const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  for (const auto& s : scored) {
    detail::OrderedJson obj;
    obj["entity_id"] = s.entity_id;
    obj["release_year_score"] = s.components.release_year;
    obj["rank_score"] = s.components.rank;
    obj["rating_count_score"] = s.components.rating_count;
    obj["importance"] = s.importance;
    out << detail::dump_line(obj) << '\n';
  }
  detail::finish_output(out, path);
}

std::vector<ScoredTitle> read_scored_jsonl(const std::filesystem::path& path) {
  std::vector<ScoredTitle> scored;
  detail::for_each_line(path, [&](std::string_view line, std::size_t number) {
    if (line.empty()) return;
    try {
      const auto obj = detail::Json::parse(line);
      ScoredTitle s;
      s.entity_id = obj.at("entity_id").get<std::string>();
      s.components.release_year = obj.at("release_year_score").get<double>();
      s.components.rank = obj.at("rank_score").get<double>();
      s.components.rating_count = obj.at("rating_count_score").get<double>();
      s.importance = obj.at("importance").get<double>();
      scored.push_back(std::move(s));
    } catch (const detail::Json::exception& e) {
      throw IngestError(fmt::format("{}:{}: {}", path.string(), number, e.what()));
    }
  });
  return scored;
}

}  // namespace erkit
