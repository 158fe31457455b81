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

#include "cli.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "erkit/catalog.hpp"
#include "erkit/clickstream.hpp"
#include "erkit/diagnose.hpp"
#include "erkit/error.hpp"
#include "erkit/importance.hpp"
#include "erkit/metrics.hpp"
#include "erkit/parallel.hpp"
#include "erkit/relevance.hpp"
#include "erkit/simulate.hpp"
#include "json.hpp"

namespace erkit::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr std::string_view kDefaultsTable = R"(Defaults:
  k                    5        results considered per query (@k)
  bins                 high,medium,low
  target-bin           high     deliverable bin for diagnose
  min-impressions      25       CTR filter: impressions per (query, entity)
  min-ctr              0.3      CTR filter: click-through rate
  min-importance       0.3      relevance filter on importance score
  w-year/w-rank/w-count 1/3 each importance weights (must sum to 1)
  missing-policy       default_score (component score 0.5)
  bounds               fit      normalization bounds fitted from the catalog
  simulate             n-titles 1000, n-queries 500, typo-rate 0.02,
                       noise-sigma 0.05, t-high 0.9, t-medium 0.7,
                       retrieve-m 10, decay 0.7, replays 200
  threads              1        (env ER_EVALKIT_THREADS)

A flat key=value file given with --config supplies any flag not set on the
command line, e.g. "min-ctr = 0.4".
)";

struct GlobalOptions {
  unsigned threads = 1;
  bool strict = false;
  std::string config_path;
};

void print_json(std::ostream& out, const Json& value) {
  out << value.dump(2) << '\n';
}

std::vector<ConfidenceBin> parse_bins(const std::vector<std::string>& names) {
  std::vector<ConfidenceBin> bins;
  for (const auto& n : names) {
    const auto bin = parse_bin(n);
    if (!bin) throw ConfigError("unknown bin: " + n);
    if (std::find(bins.begin(), bins.end(), *bin) != bins.end()) {
      throw ConfigError("bin listed twice: " + n);
    }
    bins.push_back(*bin);
  }
  return bins;
}

// ---- subcommand state ---------------------------------------------------

struct IngestArgs {
  std::string basics, ratings, ranks, out;
  int min_year = 1870;
  int max_year = 2100;
};

struct ScoreArgs {
  std::string catalog, out;
  double w_year = 1.0 / 3.0, w_rank = 1.0 / 3.0, w_count = 1.0 / 3.0;
  std::string missing_policy = "default_score";
  double default_score = 0.5;
  std::string bounds = "fit";
  NormalizationBounds fixed;
};

struct AggregateArgs {
  std::string events, out;
  std::size_t shards = 1;
};

struct RelevanceArgs {
  std::string ctr, scored, out, provenance;
  CtrFilter filter;
  double min_importance = 0.3;
};

struct EvaluateArgs {
  std::string qrels, run, out;
  std::size_t k = 5;
  std::vector<std::string> bins{"high", "medium", "low"};
  bool per_query = false;
  bool table = false;
};

struct DiagnoseArgs {
  std::string qrels, run, out;
  std::size_t k = 5;
  std::string target_bin = "high";
};

struct CompareArgs {
  std::string baseline, candidate, out, table;
};

struct SimulateArgs {
  SimConfig config;
  std::string out_dir;
};

// ---- subcommand bodies --------------------------------------------------

int run_ingest(const IngestArgs& a, const GlobalOptions& g, std::ostream& out) {
  CatalogOptions options;
  options.strict = g.strict;
  options.min_year = a.min_year;
  options.max_year = a.max_year;
  std::optional<fs::path> ranks;
  if (!a.ranks.empty()) ranks = a.ranks;
  const auto parsed = parse_catalog(a.basics, a.ratings, ranks, options);
  write_catalog_jsonl(parsed.catalog, a.out);
  const auto& s = parsed.stats;
  print_json(out, {{"command", "ingest-catalog"},
                   {"titles", parsed.catalog.size()},
                   {"basics_rows", s.basics_rows},
                   {"basics_rejects", s.basics_rejects},
                   {"ratings_rows", s.ratings_rows},
                   {"ratings_rejects", s.ratings_rejects},
                   {"ratings_orphans", s.ratings_orphans},
                   {"ranks_rows", s.ranks_rows},
                   {"ranks_rejects", s.ranks_rejects},
                   {"ranks_orphans", s.ranks_orphans},
                   {"pseudo_rank", s.pseudo_rank},
                   {"out", a.out}});
  return kExitOk;
}

int run_score(const ScoreArgs& a, const GlobalOptions& g, std::ostream& out) {
  ImportanceConfig config;
  config.weights = {a.w_year, a.w_rank, a.w_count};
  config.missing_feature_policy = a.missing_policy == "exclude_title"
                                      ? MissingFeaturePolicy::kExcludeTitle
                                      : MissingFeaturePolicy::kDefaultScore;
  config.default_component_score = a.default_score;
  if (a.bounds == "fixed") config.bounds = a.fixed;
  const Catalog catalog = read_catalog_jsonl(a.catalog);
  const auto result = score_catalog(catalog, config, resolve_threads(g.threads));
  write_scored_jsonl(result.scored, a.out);
  const auto& b = result.bounds_used;
  print_json(out, {{"command", "score-importance"},
                   {"scored", result.scored.size()},
                   {"excluded", result.excluded},
                   {"defaulted", result.defaulted},
                   {"bounds",
                    {{"mode", a.bounds},
                     {"min_year", b.min_year},
                     {"max_year", b.max_year},
                     {"min_rank", b.min_rank},
                     {"max_rank", b.max_rank},
                     {"min_rating_count", result.min_rating_count_used},
                     {"max_rating_count", b.max_rating_count}}},
                   {"out", a.out}});
  return kExitOk;
}

int run_aggregate(const AggregateArgs& a, const GlobalOptions& g,
                  std::ostream& out) {
  const auto parsed = parse_events(a.events, g.strict);
  const auto records = aggregate_pairs_sharded(parsed.events, a.shards,
                                               resolve_threads(g.threads));
  write_ctr_jsonl(records, a.out);
  print_json(out, {{"command", "aggregate-ctr"},
                   {"lines", parsed.lines},
                   {"events", parsed.events.size()},
                   {"rejects", parsed.rejects},
                   {"pairs", records.size()},
                   {"out", a.out}});
  return kExitOk;
}

int run_relevance(const RelevanceArgs& a, const GlobalOptions&,
                  std::ostream& out) {
  a.filter.validate();
  const auto records = read_ctr_jsonl(a.ctr);
  const auto scored = read_scored_jsonl(a.scored);
  const auto filtered = filter_records(records, a.filter);
  const auto merged = merge_relevance(filtered.records, scored, a.min_importance);
  const std::string provenance =
      a.provenance.empty() ? a.out + ".provenance.jsonl" : a.provenance;
  emit_qrels(merged.relevance, a.out);
  emit_provenance(merged.relevance, provenance);
  print_json(out, {{"command", "build-relevance"},
                   {"ctr_records", records.size()},
                   {"filter_kept", filtered.kept},
                   {"filter_dropped", filtered.dropped},
                   {"dropped_unknown_entity", merged.dropped_unknown_entity},
                   {"dropped_low_importance", merged.dropped_low_importance},
                   {"queries", merged.relevance.entries.size()},
                   {"pairs", merged.relevance.pair_count()},
                   {"out", a.out},
                   {"provenance", provenance}});
  return kExitOk;
}

int run_evaluate(const EvaluateArgs& a, const GlobalOptions& g,
                 std::ostream& out, std::ostream& err) {
  EvalOptions options;
  options.k = a.k;
  options.bins = parse_bins(a.bins);
  options.threads = resolve_threads(g.threads);
  const auto qrels = load_qrels(a.qrels);
  const auto run = load_run(a.run);
  if (run.nonmonotone > 0) {
    err << fmt::format("warning: {} run queries have nonmonotone scores\n",
                       run.nonmonotone);
  }
  const auto report = evaluate_run(qrels, run.runs, options);
  const std::string json = report_to_json(report, a.per_query);
  if (!a.out.empty()) {
    std::ofstream file(a.out, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot write file: " + a.out);
    file << json << '\n';
    if (!file) throw IoError("write failure: " + a.out);
  }
  if (a.table) {
    out << render_report_table(report);
  } else {
    out << json << '\n';
  }
  return kExitOk;
}

int run_diagnose(const DiagnoseArgs& a, const GlobalOptions&, std::ostream& out) {
  const auto target = parse_bin(a.target_bin);
  if (!target) throw ConfigError("unknown target bin: " + a.target_bin);
  const auto qrels = load_qrels(a.qrels);
  const auto run = load_run(a.run);
  const auto summary = diagnose_run(qrels, run.runs, a.k, *target);
  if (!a.out.empty()) write_diagnoses_jsonl(summary, a.out);
  out << summary_to_json(summary) << '\n';
  return kExitOk;
}

int run_compare(const CompareArgs& a, const GlobalOptions&, std::ostream& out) {
  const auto baseline = read_report(a.baseline);
  const auto candidate = read_report(a.candidate);
  const auto delta = compare_reports(baseline, candidate);
  const std::string json = delta_to_json(delta);
  if (!a.out.empty()) {
    std::ofstream file(a.out, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot write file: " + a.out);
    file << json << '\n';
  }
  if (a.table == "full") {
    out << render_delta_table(delta);
  } else if (a.table == "headline") {
    out << render_headline_table(delta, fs::path(a.candidate).stem().string());
  } else {
    out << json << '\n';
  }
  return kExitOk;
}

int run_simulate(const SimulateArgs& a, const GlobalOptions& g,
                 std::ostream& out) {
  const Simulation sim = simulate(a.config, resolve_threads(g.threads));
  write_simulation(sim, a.out_dir);
  const fs::path dir(a.out_dir);
  print_json(out, {{"command", "simulate"},
                   {"seed", a.config.seed},
                   {"titles", sim.catalog.size()},
                   {"queries", sim.queries.size()},
                   {"events", sim.events.size()},
                   {"files",
                    {{"basics", (dir / "basics.tsv").string()},
                     {"ratings", (dir / "ratings.tsv").string()},
                     {"ranks", (dir / "ranks.tsv").string()},
                     {"truth", (dir / "truth.jsonl").string()},
                     {"run", (dir / "run.jsonl").string()},
                     {"events", (dir / "events.jsonl").string()}}}});
  return kExitOk;
}

// ---- flat config file ---------------------------------------------------

std::map<std::string, std::string> read_flat_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::FileError::Missing(path);
  std::map<std::string, std::string> entries;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw CLI::ConversionError(
          fmt::format("{}:{}: expected key = value", path, number));
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r\"");
      const auto e = s.find_last_not_of(" \t\r\"");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '_', '-');
    entries[key] = trim(line.substr(eq + 1));
  }
  return entries;
}

bool given_on_command_line(const CLI::Option& opt,
                           const std::vector<std::string>& args) {
  for (const auto& arg : args) {
    for (const auto& n : opt.get_lnames()) {
      const std::string flag = "--" + n;
      if (arg == flag || arg.rfind(flag + "=", 0) == 0) return true;
    }
    for (const auto& n : opt.get_snames()) {
      if (arg.rfind("-" + n, 0) == 0) return true;
    }
  }
  return false;
}

// Finds the value of --config in raw args, before CLI11 parses them.
std::optional<std::string> find_config_arg(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

// Appends "--key=value" for every config entry the user did not pass. Keys
// that belong to another subcommand are skipped; unknown keys are an error.
std::vector<std::string> expand_config(CLI::App& app,
                                       const std::vector<std::string>& args) {
  const auto path = find_config_arg(args);
  if (!path) return args;
  const auto entries = read_flat_config(*path);

  CLI::App* selected = nullptr;
  for (const auto& arg : args) {
    for (auto* sub : app.get_subcommands({})) {
      if (sub->get_name() == arg) selected = sub;
    }
    if (selected) break;
  }
  std::vector<std::string> expanded = args;
  for (const auto& [key, value] : entries) {
    const std::string name = "--" + key;
    const CLI::Option* opt = nullptr;
    if (selected) opt = selected->get_option_no_throw(name);
    if (!opt) opt = app.get_option_no_throw(name);
    if (!opt) {
      bool known_elsewhere = false;
      for (const auto* sub : app.get_subcommands({})) {
        known_elsewhere = known_elsewhere || sub->get_option_no_throw(name);
      }
      if (!known_elsewhere) {
        throw CLI::ExtrasError(fmt::format("unknown config key '{}'", key),
                               CLI::ExitCodes::ExtrasError);
      }
      continue;
    }
    if (given_on_command_line(*opt, args) || name == "--config") continue;
    expanded.push_back(name + "=" + value);
  }
  return expanded;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"er-evalkit: relevance generation and bin-aware evaluation for "
               "entity resolution",
               "er-evalkit"};
  app.footer(std::string(kDefaultsTable));
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  app.add_option("--threads", global.threads,
                 "Worker threads (0 = hardware concurrency)")
      ->envname("ER_EVALKIT_THREADS")
      ->capture_default_str();
  app.add_flag("--strict", global.strict,
               "Turn reject tallies into errors (exit 1)");
  app.add_option("--config", global.config_path,
                 "Flat key=value file supplying default flag values");

  // ingest-catalog
  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand(
      "ingest-catalog", "Join IMDb-style TSV dumps into canonical catalog JSONL");
  ingest_cmd->add_option("--basics", ingest.basics, "basics TSV")->required();
  ingest_cmd->add_option("--ratings", ingest.ratings, "ratings TSV")->required();
  ingest_cmd->add_option("--ranks", ingest.ranks,
                         "ranks TSV (pseudo-rank by rating count if absent)");
  ingest_cmd->add_option("--out", ingest.out, "catalog JSONL")->required();
  ingest_cmd->add_option("--min-year", ingest.min_year)->capture_default_str();
  ingest_cmd->add_option("--max-year", ingest.max_year)->capture_default_str();

  // score-importance
  ScoreArgs score;
  auto* score_cmd = app.add_subcommand(
      "score-importance", "Normalize popularity features and combine them");
  score_cmd->add_option("--catalog", score.catalog, "catalog JSONL")->required();
  score_cmd->add_option("--out", score.out, "scored JSONL")->required();
  score_cmd->add_option("--w-year", score.w_year)->capture_default_str();
  score_cmd->add_option("--w-rank", score.w_rank)->capture_default_str();
  score_cmd->add_option("--w-count", score.w_count)->capture_default_str();
  score_cmd->add_option("--missing-policy", score.missing_policy)
      ->check(CLI::IsMember({"default_score", "exclude_title"}))
      ->capture_default_str();
  score_cmd->add_option("--default-score", score.default_score)
      ->capture_default_str();
  score_cmd->add_option("--bounds", score.bounds)
      ->check(CLI::IsMember({"fit", "fixed"}))
      ->capture_default_str();
  score_cmd->add_option("--min-year", score.fixed.min_year)->capture_default_str();
  score_cmd->add_option("--max-year", score.fixed.max_year)->capture_default_str();
  score_cmd->add_option("--min-rank", score.fixed.min_rank)->capture_default_str();
  score_cmd->add_option("--max-rank", score.fixed.max_rank)->capture_default_str();
  score_cmd->add_option("--max-rating-count", score.fixed.max_rating_count)
      ->capture_default_str();

  // aggregate-ctr
  AggregateArgs aggregate_args;
  auto* aggregate_cmd = app.add_subcommand(
      "aggregate-ctr", "Aggregate click events into per-pair CTR records");
  aggregate_cmd->add_option("--events", aggregate_args.events, "event JSONL")
      ->required();
  aggregate_cmd->add_option("--out", aggregate_args.out, "CTR JSONL")->required();
  aggregate_cmd->add_option("--shards", aggregate_args.shards,
                            "Independent aggregation shards")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  // build-relevance
  RelevanceArgs relevance;
  auto* relevance_cmd = app.add_subcommand(
      "build-relevance", "Filter CTR pairs and join them with importance scores");
  relevance_cmd->add_option("--ctr", relevance.ctr, "CTR JSONL")->required();
  relevance_cmd->add_option("--scored", relevance.scored, "scored JSONL")
      ->required();
  relevance_cmd->add_option("--out", relevance.out, "qrels JSONL")->required();
  relevance_cmd->add_option("--provenance", relevance.provenance,
                            "provenance sidecar (default <out>.provenance.jsonl)");
  relevance_cmd->add_option("--min-impressions", relevance.filter.min_impressions)
      ->capture_default_str();
  relevance_cmd->add_option("--min-ctr", relevance.filter.min_ctr)
      ->capture_default_str();
  relevance_cmd->add_option("--min-importance", relevance.min_importance)
      ->capture_default_str();

  // evaluate
  EvaluateArgs evaluate;
  auto* evaluate_cmd = app.add_subcommand(
      "evaluate", "Precision/recall @k and @k@bin for a run against qrels");
  evaluate_cmd->add_option("--qrels", evaluate.qrels, "qrels JSONL")->required();
  evaluate_cmd->add_option("--run", evaluate.run, "run JSONL")->required();
  evaluate_cmd->add_option("-k,--k", evaluate.k)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  evaluate_cmd->add_option("--bins", evaluate.bins)
      ->delimiter(',')
      ->capture_default_str();
  evaluate_cmd->add_option("--out", evaluate.out, "also write report JSON here");
  evaluate_cmd->add_flag("--per-query", evaluate.per_query,
                         "Include per-query values in the report");
  evaluate_cmd->add_flag("--table", evaluate.table,
                         "Print an aligned table instead of JSON");

  // diagnose
  DiagnoseArgs diagnose;
  auto* diagnose_cmd = app.add_subcommand(
      "diagnose", "Classify each query as success or retrieval/ranking/binning miss");
  diagnose_cmd->add_option("--qrels", diagnose.qrels, "qrels JSONL")->required();
  diagnose_cmd->add_option("--run", diagnose.run, "run JSONL")->required();
  diagnose_cmd->add_option("-k,--k", diagnose.k)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  diagnose_cmd->add_option("--target-bin", diagnose.target_bin)
      ->check(CLI::IsMember({"high", "medium", "low"}))
      ->capture_default_str();
  diagnose_cmd->add_option("--out", diagnose.out, "per-query diagnosis JSONL");

  // compare
  CompareArgs compare;
  auto* compare_cmd = app.add_subcommand(
      "compare", "Signed absolute and relative deltas between two reports");
  compare_cmd->add_option("--baseline", compare.baseline, "baseline report JSON")
      ->required();
  compare_cmd->add_option("--candidate", compare.candidate,
                          "candidate report JSON")
      ->required();
  compare_cmd->add_option("--out", compare.out, "also write delta JSON here");
  compare_cmd->add_option("--table", compare.table,
                          "Print a table instead of JSON")
      ->check(CLI::IsMember({"full", "headline"}));

  // simulate
  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand(
      "simulate", "Write a seeded synthetic catalog, run, click log and truth");
  simulate_cmd->add_option("--seed", sim.config.seed)->required();
  simulate_cmd->add_option("--out-dir", sim.out_dir)->required();
  simulate_cmd->add_option("--n-titles", sim.config.n_titles)->capture_default_str();
  simulate_cmd->add_option("--n-queries", sim.config.n_queries)->capture_default_str();
  simulate_cmd->add_option("--typo-rate", sim.config.typo_rate)->capture_default_str();
  simulate_cmd->add_option("--noise-sigma", sim.config.score_noise_sigma)
      ->capture_default_str();
  simulate_cmd->add_option("--t-high", sim.config.t_high)->capture_default_str();
  simulate_cmd->add_option("--t-medium", sim.config.t_medium)->capture_default_str();
  simulate_cmd->add_option("--retrieve-m", sim.config.retrieve_m)
      ->capture_default_str();
  simulate_cmd->add_option("--decay", sim.config.click_position_decay)
      ->capture_default_str();
  simulate_cmd->add_option("--replays", sim.config.replays)->capture_default_str();

  try {
    std::vector<std::string> expanded = expand_config(app, args);
    std::reverse(expanded.begin(), expanded.end());
    app.parse(expanded);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*ingest_cmd) return run_ingest(ingest, global, out);
    if (*score_cmd) return run_score(score, global, out);
    if (*aggregate_cmd) return run_aggregate(aggregate_args, global, out);
    if (*relevance_cmd) return run_relevance(relevance, global, out);
    if (*evaluate_cmd) return run_evaluate(evaluate, global, out, err);
    if (*diagnose_cmd) return run_diagnose(diagnose, global, out);
    if (*compare_cmd) return run_compare(compare, global, out);
    if (*simulate_cmd) return run_simulate(sim, global, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace erkit::cli
