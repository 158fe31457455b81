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

#include "erkit/simulate.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "erkit/error.hpp"
#include "erkit/parallel.hpp"
#include "erkit/text.hpp"
#include "jsonl.hpp"

namespace erkit {

namespace {

enum Stream : std::uint64_t {
  kCatalogStream = 1,
  kQueryStream = 2,
  kRankingStream = 3,
  kClickStream = 4,
};

constexpr std::string_view kConsonants = "bcdfghjklmnprstvz";
constexpr std::string_view kVowels = "aeiou";
constexpr std::string_view kLetters = "abcdefghijklmnopqrstuvwxyz";

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string gen_word(SimRng& rng) {
  std::string word;
  const std::size_t syllables = 2 + rng.uniform_int(2);
  for (std::size_t s = 0; s < syllables; ++s) {
    word += kConsonants[rng.uniform_int(kConsonants.size())];
    word += kVowels[rng.uniform_int(kVowels.size())];
    if (rng.uniform() < 0.25) word += kConsonants[rng.uniform_int(kConsonants.size())];
  }
  return word;
}

std::string gen_name(SimRng& rng) {
  const std::size_t words = 1 + rng.uniform_int(3);
  std::string name = gen_word(rng);
  for (std::size_t w = 1; w < words; ++w) name += ' ' + gen_word(rng);
  return name;
}

}  // namespace

void SimConfig::validate() const {
  if (n_titles < 1) throw ConfigError("n_titles must be >= 1");
  if (n_queries < 1) throw ConfigError("n_queries must be >= 1");
  if (!(typo_rate >= 0.0 && typo_rate <= 1.0)) {
    throw ConfigError("typo_rate must lie in [0, 1]");
  }
  if (!(score_noise_sigma >= 0.0) || !std::isfinite(score_noise_sigma)) {
    throw ConfigError("score_noise_sigma must be nonnegative");
  }
  if (!(t_high <= 1.0 && t_high >= t_medium && t_medium >= 0.0)) {
    throw ConfigError("bin thresholds must satisfy 1 >= t_high >= t_medium >= 0");
  }
  if (retrieve_m < 1) throw ConfigError("retrieve_m must be >= 1");
  if (!(click_position_decay > 0.0 && click_position_decay <= 1.0)) {
    throw ConfigError("click_position_decay must lie in (0, 1]");
  }
  if (replays < 1) throw ConfigError("replays must be >= 1");
}

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL));
}

double SimRng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t SimRng::uniform_int(std::uint64_t n) {
  if (n <= 1) return 0;
  // Reject the low (2^64 mod n) values so every residue is equally likely.
  const std::uint64_t threshold = (0 - n) % n;
  while (true) {
    const std::uint64_t r = engine_();
    if (r >= threshold) return r % n;
  }
}

double SimRng::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Catalog gen_catalog(const SimConfig& config) {
  config.validate();
  SimRng rng(split_seed(config.seed, kCatalogStream));
  std::vector<Title> titles;
  titles.reserve(config.n_titles);
  std::unordered_set<std::string> names;
  for (std::size_t i = 0; i < config.n_titles; ++i) {
    Title t;
    t.entity_id = fmt::format("tt{:07d}", i + 1);
    do {
      t.name = gen_name(rng);
    } while (!names.insert(t.name).second);
    t.release_year = 1950 + static_cast<int>(rng.uniform_int(2024 - 1950 + 1));
    t.rating_count = std::llround(std::exp(7.0 + 2.0 * rng.normal()));
    t.rating = std::round((1.0 + 9.0 * rng.uniform()) * 10.0) / 10.0;
    titles.push_back(std::move(t));
  }
  assign_pseudo_ranks(titles);
  return Catalog(std::move(titles));
}

std::string apply_typos(std::string_view name, double rate, SimRng& rng) {
  std::string out;
  out.reserve(name.size() + 4);
  for (char c : name) {
    if (rate <= 0.0 || rng.uniform() >= rate) {
      out += c;
      continue;
    }
    switch (rng.uniform_int(3)) {
      case 0: {  // substitute with a different letter
        char sub = kLetters[rng.uniform_int(kLetters.size() - 1)];
        if (sub >= c && c >= 'a' && c <= 'z') sub = static_cast<char>(sub + 1);
        out += sub;
        break;
      }
      case 1:  // delete
        break;
      default:  // duplicate
        out += c;
        out += c;
        break;
    }
  }
  std::string query = normalize_query(out);
  if (query.empty()) query = normalize_query(name).substr(0, 1);
  return query;
}

std::vector<SimQuery> gen_queries(const Catalog& catalog, const SimConfig& config) {
  config.validate();
  if (catalog.empty()) throw ConfigError("cannot generate queries for an empty catalog");
  SimRng rng(split_seed(config.seed, kQueryStream));

  std::vector<std::size_t> order(catalog.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.uniform_int(i)]);
  }

  std::vector<SimQuery> queries;
  std::unordered_set<std::string> used;
  const std::size_t wanted = std::min(config.n_queries, catalog.size());
  for (std::size_t idx : order) {
    if (queries.size() == wanted) break;
    const Title& t = catalog.titles()[idx];
    std::string q = apply_typos(t.name, config.typo_rate, rng);
    if (!used.insert(q).second) continue;
    queries.push_back({std::move(q), t.entity_id});
  }
  return queries;
}

std::vector<RunResult> run_mock_er(const Catalog& catalog,
                                   std::span<const SimQuery> queries,
                                   const SimConfig& config, unsigned threads) {
  config.validate();
  const std::uint64_t stream_seed = split_seed(config.seed, kRankingStream);
  const auto& titles = catalog.titles();
  std::vector<RunResult> run(queries.size());
  parallel_for_chunks(queries.size(), threads, [&](std::size_t begin, std::size_t end) {
    std::vector<std::pair<double, std::size_t>> scored(titles.size());
    for (std::size_t qi = begin; qi < end; ++qi) {
      SimRng rng(split_seed(stream_seed, qi));
      const std::string& query = queries[qi].query;
      for (std::size_t ti = 0; ti < titles.size(); ++ti) {
        double score = edit_similarity(query, titles[ti].name);
        if (config.score_noise_sigma > 0.0) {
          score += config.score_noise_sigma * rng.normal();
        }
        scored[ti] = {std::clamp(score, 0.0, 1.0), ti};
      }
      const std::size_t m = std::min(config.retrieve_m, scored.size());
      std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(m),
                        scored.end(), [&](const auto& a, const auto& b) {
                          if (a.first != b.first) return a.first > b.first;
                          return titles[a.second].entity_id < titles[b.second].entity_id;
                        });
      RunResult& r = run[qi];
      r.query = query;
      r.ranked.reserve(m);
      for (std::size_t i = 0; i < m; ++i) {
        const double s = scored[i].first;
        const ConfidenceBin bin = s >= config.t_high     ? ConfidenceBin::kHigh
                                  : s >= config.t_medium ? ConfidenceBin::kMedium
                                                         : ConfidenceBin::kLow;
        r.ranked.push_back({titles[scored[i].second].entity_id, s, bin});
      }
    }
  });
  return run;
}

std::vector<ClickEvent> gen_clicklog(std::span<const RunResult> run,
                                     std::span<const SimQuery> truth,
                                     const SimConfig& config) {
  config.validate();
  std::unordered_map<std::string_view, std::string_view> true_entity;
  for (const auto& q : truth) true_entity.emplace(q.query, q.true_entity_id);

  const std::uint64_t stream_seed = split_seed(config.seed, kClickStream);
  std::vector<ClickEvent> events;
  events.reserve(run.size() * config.replays);
  for (std::size_t qi = 0; qi < run.size(); ++qi) {
    const RunResult& r = run[qi];
    if (r.ranked.empty()) continue;
    SimRng rng(split_seed(stream_seed, qi));

    std::vector<std::string> impressions;
    impressions.reserve(r.ranked.size());
    for (const auto& e : r.ranked) impressions.push_back(e.entity_id);

    std::optional<std::size_t> position;  // 1-based
    if (const auto it = true_entity.find(r.query); it != true_entity.end()) {
      for (std::size_t i = 0; i < impressions.size(); ++i) {
        if (impressions[i] == it->second) {
          position = i + 1;
          break;
        }
      }
    }
    const double p_click =
        position ? std::pow(config.click_position_decay,
                            static_cast<double>(*position - 1))
                 : 0.0;
    for (std::size_t rep = 0; rep < config.replays; ++rep) {
      ClickEvent e;
      e.query = r.query;
      e.impressions = impressions;
      if (position && rng.uniform() < p_click) e.clicked = impressions[*position - 1];
      events.push_back(std::move(e));
    }
  }
  return events;
}

RelevanceSet truth_relevance(std::span<const SimQuery> queries) {
  RelevanceSet relevance;
  for (const auto& q : queries) relevance.entries[q.query].insert(q.true_entity_id);
  return relevance;
}

Simulation simulate(const SimConfig& config, unsigned threads) {
  Simulation sim;
  sim.catalog = gen_catalog(config);
  sim.queries = gen_queries(sim.catalog, config);
  sim.run = run_mock_er(sim.catalog, sim.queries, config, threads);
  sim.events = gen_clicklog(sim.run, sim.queries, config);
  return sim;
}

void write_truth_jsonl(std::span<const SimQuery> queries,
                       const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  for (const auto& q : queries) {
    detail::OrderedJson obj;
    obj["query"] = q.query;
    obj["true_entity_id"] = q.true_entity_id;
    out << detail::dump_line(obj) << '\n';
  }
  detail::finish_output(out, path);
}

std::vector<SimQuery> read_truth_jsonl(const std::filesystem::path& path) {
  std::vector<SimQuery> queries;
  detail::for_each_line(path, [&](std::string_view line, std::size_t number) {
    if (line.empty()) return;
    try {
      const auto obj = detail::Json::parse(line);
      queries.push_back({obj.at("query").get<std::string>(),
                         obj.at("true_entity_id").get<std::string>()});
    } catch (const detail::Json::exception& e) {
      throw IngestError(fmt::format("{}:{}: {}", path.string(), number, e.what()));
    }
  });
  return queries;
}

void write_simulation(const Simulation& sim, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  write_catalog_tsv(sim.catalog, dir / "basics.tsv", dir / "ratings.tsv",
                    dir / "ranks.tsv");
  write_truth_jsonl(sim.queries, dir / "truth.jsonl");
  write_run_jsonl(sim.run, dir / "run.jsonl");
  write_events_jsonl(sim.events, dir / "events.jsonl");
}

}  // namespace erkit
