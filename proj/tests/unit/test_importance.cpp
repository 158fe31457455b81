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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "erkit/catalog.hpp"
#include "erkit/error.hpp"
#include "erkit/importance.hpp"
#include "test_util.hpp"

namespace erkit {
namespace {

Title make_title(std::string id, std::optional<int> year,
                 std::optional<std::int64_t> rank,
                 std::optional<std::int64_t> count) {
  Title t;
  t.entity_id = std::move(id);
  t.name = t.entity_id;
  t.release_year = year;
  t.rank = rank;
  t.rating_count = count;
  return t;
}

TEST(LinearScore, Examples) {
  EXPECT_EQ(linear_score(1990, 1990, 2020), 0.0);
  EXPECT_EQ(linear_score(2020, 1990, 2020), 1.0);
  EXPECT_EQ(linear_score(2005, 1990, 2020), 0.5);
  EXPECT_EQ(linear_score(1800, 1990, 2020), 0.0);
  EXPECT_EQ(linear_score(2100, 1990, 2020), 1.0);
  EXPECT_THROW(linear_score(1, 5, 5), ConfigError);
  EXPECT_THROW(linear_score(1, 6, 5), ConfigError);
}

TEST(LogScaleScore, Examples) {
  EXPECT_NEAR(log_scale_score(10, 1, 100, true), 0.5, 1e-15);
  EXPECT_EQ(log_scale_score(1, 1, 100, true), 1.0);
  EXPECT_EQ(log_scale_score(100, 1, 100, false), 1.0);
  EXPECT_EQ(log_scale_score(1, 1, 100, false), 0.0);
  EXPECT_EQ(log_scale_score(1000, 1, 100, false), 1.0);
  EXPECT_THROW(log_scale_score(0, 1, 100, false), DomainError);
  EXPECT_THROW(log_scale_score(5, -1, 100, false), DomainError);
  EXPECT_THROW(log_scale_score(5, 1, 0, false), DomainError);
  EXPECT_THROW(log_scale_score(5, 100, 10, false), ConfigError);
}

TEST(ImportanceScore, Examples) {
  ImportanceConfig uniform;
  EXPECT_DOUBLE_EQ(importance_score({1, 1, 1}, uniform), 1.0);
  EXPECT_EQ(importance_score({0, 0, 0}, uniform), 0.0);
  EXPECT_NEAR(importance_score({0.6, 0.9, 0.0}, uniform), 0.5, 1e-15);

  ImportanceConfig year_only;
  year_only.weights = {1.0, 0.0, 0.0};
  EXPECT_EQ(importance_score({0.37, 0.9, 0.1}, year_only), 0.37);
}

TEST(ImportanceConfig, Validation) {
  ImportanceConfig config;
  EXPECT_NO_THROW(config.validate());
  config.weights = {0.5, 0.5, 0.5};
  EXPECT_THROW(config.validate(), ConfigError);
  config.weights = {1.5, -0.5, 0.0};
  EXPECT_THROW(config.validate(), ConfigError);
  config = {};
  config.default_component_score = 1.5;
  EXPECT_THROW(config.validate(), ConfigError);
  config = {};
  config.bounds = NormalizationBounds{.min_year = 2000, .max_year = 1990};
  EXPECT_THROW(config.validate(), ConfigError);
}

TEST(ScoreCatalog, ThreeTitleMiddleIsHalf) {
  Catalog catalog({make_title("a", 1990, 100, 1), make_title("b", 2005, 10, 10),
                   make_title("c", 2020, 1, 100)});
  const auto result = score_catalog(catalog, {});
  ASSERT_EQ(result.scored.size(), 3u);
  const auto& mid = result.scored[1];
  EXPECT_EQ(mid.entity_id, "b");
  EXPECT_NEAR(mid.components.release_year, 0.5, 1e-15);
  EXPECT_NEAR(mid.components.rank, 0.5, 1e-15);
  EXPECT_NEAR(mid.components.rating_count, 0.5, 1e-15);
  EXPECT_NEAR(mid.importance, 0.5, 1e-15);
  EXPECT_NEAR(result.scored[0].importance, 0.0, 1e-15);
  EXPECT_NEAR(result.scored[2].importance, 1.0, 1e-15);
}

TEST(ScoreCatalog, SingleTitleDegeneratesToOne) {
  Catalog catalog({make_title("a", 2001, 7, 123)});
  const auto result = score_catalog(catalog, {});
  ASSERT_EQ(result.scored.size(), 1u);
  EXPECT_EQ(result.scored[0].components.release_year, 1.0);
  EXPECT_EQ(result.scored[0].components.rank, 1.0);
  EXPECT_EQ(result.scored[0].components.rating_count, 1.0);
  EXPECT_NEAR(result.scored[0].importance, 1.0, 1e-12);
}

TEST(ScoreCatalog, MissingFeaturePolicies) {
  Catalog catalog({make_title("a", 1990, 100, 1), make_title("b", 2005, 10, std::nullopt),
                   make_title("c", 2020, 1, 100)});
  const auto defaulted = score_catalog(catalog, {});
  ASSERT_EQ(defaulted.scored.size(), 3u);
  EXPECT_EQ(defaulted.defaulted, 1u);
  EXPECT_EQ(defaulted.scored[1].components.rating_count, 0.5);

  ImportanceConfig strict;
  strict.missing_feature_policy = MissingFeaturePolicy::kExcludeTitle;
  const auto excluded = score_catalog(catalog, strict);
  EXPECT_EQ(excluded.excluded, 1u);
  ASSERT_EQ(excluded.scored.size(), 2u);
  EXPECT_EQ(excluded.scored[0].entity_id, "a");
  EXPECT_EQ(excluded.scored[1].entity_id, "c");
}

TEST(ScoreCatalog, FeatureMissingEverywhereNamesIt) {
  Catalog catalog({make_title("a", 1990, std::nullopt, 5),
                   make_title("b", 2000, std::nullopt, 50)});
  try {
    score_catalog(catalog, {});
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("rank"), std::string::npos);
  }
}

TEST(ScoreCatalog, FixedBoundsAndZeroCount) {
  ImportanceConfig config;
  config.bounds = NormalizationBounds{.min_year = 1990, .max_year = 2020, .min_rank = 1,
                                      .max_rank = 100, .max_rating_count = 100};
  Catalog catalog({make_title("a", 2005, 10, 10), make_title("b", 2005, 10, 0)});
  const auto result = score_catalog(catalog, config);
  EXPECT_NEAR(result.scored[0].importance, 0.5, 1e-15);
  EXPECT_EQ(result.scored[1].components.rating_count, 0.0);
}

TEST(ScoreCatalog, MonotoneRangeDeterministic) {
  std::mt19937_64 rng(11);
  std::vector<Title> titles;
  for (int i = 0; i < 300; ++i) {
    titles.push_back(make_title("t" + std::to_string(i),
                                std::uniform_int_distribution<int>(1900, 2024)(rng),
                                std::uniform_int_distribution<std::int64_t>(1, 5000)(rng),
                                std::uniform_int_distribution<std::int64_t>(0, 900000)(rng)));
  }
  const Catalog catalog(titles);
  ImportanceConfig config;
  config.weights = {0.2, 0.5, 0.3};
  const auto one = score_catalog(catalog, config, 1);
  const auto many = score_catalog(catalog, config, 8);
  ASSERT_EQ(one.scored.size(), many.scored.size());
  for (std::size_t i = 0; i < one.scored.size(); ++i) {
    EXPECT_EQ(one.scored[i].importance, many.scored[i].importance);
    EXPECT_GE(one.scored[i].importance, 0.0);
    EXPECT_LE(one.scored[i].importance, 1.0);
  }

  // Fix bounds to the fitted ones and perturb one feature at a time.
  config.bounds = one.bounds_used;
  auto score_of = [&](const Title& t) {
    return score_catalog(Catalog({t}), config).scored.at(0).importance;
  };
  for (int i = 0; i < 50; ++i) {
    const Title base = titles[static_cast<std::size_t>(i)];
    Title newer = base;
    *newer.release_year += 5;
    EXPECT_GE(score_of(newer), score_of(base));
    Title worse_rank = base;
    *worse_rank.rank += 100;
    EXPECT_LE(score_of(worse_rank), score_of(base));
    Title more_votes = base;
    *more_votes.rating_count += 1000;
    EXPECT_GE(score_of(more_votes), score_of(base));
  }
}

TEST(ScoreCatalog, JsonlRoundTrip) {
  testing::TempDir dir;
  Catalog catalog({make_title("a", 1990, 100, 1), make_title("b", 2005, 10, 10)});
  const auto result = score_catalog(catalog, {});
  write_scored_jsonl(result.scored, dir / "s.jsonl");
  const auto back = read_scored_jsonl(dir / "s.jsonl");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].entity_id, "b");
  EXPECT_EQ(back[1].importance, result.scored[1].importance);
  EXPECT_EQ(back[1].components.rank, result.scored[1].components.rank);
}

}  // namespace
}  // namespace erkit
