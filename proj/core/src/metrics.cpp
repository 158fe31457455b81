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

#include "erkit/metrics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <unordered_map>
#include <unordered_set>

#include "erkit/error.hpp"
#include "erkit/parallel.hpp"
#include "erkit/text.hpp"
#include "jsonl.hpp"

namespace erkit {

namespace {

struct TopKCounts {
  std::uint64_t hits = 0;
  std::uint64_t retrieved = 0;
};

TopKCounts count_top_k(const RelevantIds& relevant,
                       std::span<const RankedEntity> ranked, std::size_t k,
                       std::optional<ConfidenceBin> bin) {
  if (k < 1) throw DomainError("k must be >= 1");
  TopKCounts counts;
  const std::size_t depth = std::min(k, ranked.size());
  for (std::size_t i = 0; i < depth; ++i) {
    if (bin && ranked[i].bin != *bin) continue;
    ++counts.retrieved;
    if (relevant.contains(ranked[i].entity_id)) ++counts.hits;
  }
  return counts;
}

std::string format_value(const std::optional<double>& v) {
  return v ? fmt::format("{:.4f}", *v) : std::string("n/a");
}

std::optional<MetricId> parse_metric_name(std::string_view name) {
  MetricId id;
  const auto at = name.find('@');
  if (at == std::string_view::npos) return std::nullopt;
  const auto kind = name.substr(0, at);
  if (kind == "recall") {
    id.kind = MetricKind::kRecall;
  } else if (kind == "precision") {
    id.kind = MetricKind::kPrecision;
  } else {
    return std::nullopt;
  }
  auto rest = name.substr(at + 1);
  const auto second = rest.find('@');
  const auto k_text = rest.substr(0, second);
  const auto [ptr, ec] =
      std::from_chars(k_text.data(), k_text.data() + k_text.size(), id.k);
  if (ec != std::errc() || ptr != k_text.data() + k_text.size() || id.k == 0) {
    return std::nullopt;
  }
  if (second != std::string_view::npos) {
    id.bin = parse_bin(rest.substr(second + 1));
    if (!id.bin) return std::nullopt;
  }
  return id;
}

detail::OrderedJson optional_json(const std::optional<double>& v) {
  return v ? detail::OrderedJson(*v) : detail::OrderedJson(nullptr);
}

std::optional<double> optional_from_json(const detail::Json& v) {
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

}  // namespace

std::string_view to_string(ConfidenceBin bin) {
  switch (bin) {
    case ConfidenceBin::kHigh:
      return "high";
    case ConfidenceBin::kMedium:
      return "medium";
    case ConfidenceBin::kLow:
      return "low";
  }
  return "low";
}

std::optional<ConfidenceBin> parse_bin(std::string_view text) {
  if (text == "high") return ConfidenceBin::kHigh;
  if (text == "medium") return ConfidenceBin::kMedium;
  if (text == "low") return ConfidenceBin::kLow;
  return std::nullopt;
}

Fraction recall_fraction(const RelevantIds& relevant,
                         std::span<const RankedEntity> ranked, std::size_t k,
                         std::optional<ConfidenceBin> bin) {
  const auto c = count_top_k(relevant, ranked, k, bin);
  return {c.hits, relevant.size()};
}

Fraction precision_fraction(const RelevantIds& relevant,
                            std::span<const RankedEntity> ranked, std::size_t k,
                            std::optional<ConfidenceBin> bin) {
  const auto c = count_top_k(relevant, ranked, k, bin);
  return {c.hits, c.retrieved};
}

std::optional<double> recall_at_k(const RelevantIds& relevant,
                                  std::span<const RankedEntity> ranked,
                                  std::size_t k) {
  return recall_fraction(relevant, ranked, k).value();
}

std::optional<double> precision_at_k(const RelevantIds& relevant,
                                     std::span<const RankedEntity> ranked,
                                     std::size_t k) {
  return precision_fraction(relevant, ranked, k).value();
}

std::optional<double> recall_at_k_bin(const RelevantIds& relevant,
                                      std::span<const RankedEntity> ranked,
                                      std::size_t k, ConfidenceBin bin) {
  return recall_fraction(relevant, ranked, k, bin).value();
}

std::optional<double> precision_at_k_bin(const RelevantIds& relevant,
                                         std::span<const RankedEntity> ranked,
                                         std::size_t k, ConfidenceBin bin) {
  return precision_fraction(relevant, ranked, k, bin).value();
}

std::optional<double> aggregate(std::span<const Fraction> values,
                                AggregateMode mode) {
  std::uint64_t num = 0;
  std::uint64_t den = 0;
  double sum = 0.0;
  std::size_t defined = 0;
  for (const auto& f : values) {
    if (!f.defined()) continue;
    num += f.num;
    den += f.den;
    sum += *f.value();
    ++defined;
  }
  if (defined == 0) return std::nullopt;
  if (mode == AggregateMode::kMicro) {
    return static_cast<double>(num) / static_cast<double>(den);
  }
  return sum / static_cast<double>(defined);
}

std::string MetricId::name() const {
  std::string out = fmt::format(
      "{}@{}", kind == MetricKind::kRecall ? "recall" : "precision", k);
  if (bin) out += fmt::format("@{}", to_string(*bin));
  return out;
}

std::vector<MetricId> report_metrics(std::size_t k,
                                     std::span<const ConfidenceBin> bins) {
  std::vector<MetricId> ids;
  ids.push_back({MetricKind::kRecall, k, std::nullopt});
  ids.push_back({MetricKind::kPrecision, k, std::nullopt});
  for (const auto bin : bins) {
    ids.push_back({MetricKind::kRecall, k, bin});
    ids.push_back({MetricKind::kPrecision, k, bin});
  }
  const MetricId p1_high{MetricKind::kPrecision, 1, ConfidenceBin::kHigh};
  if (std::find(ids.begin(), ids.end(), p1_high) == ids.end()) {
    ids.push_back(p1_high);
  }
  return ids;
}

const AggregateValue* MetricsReport::find(std::string_view metric_name) const {
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    if (metrics[i].name() == metric_name) return &aggregate[i];
  }
  return nullptr;
}

MetricsReport evaluate_run(const RelevanceSet& qrels,
                           std::span<const RunResult> run,
                           const EvalOptions& options) {
  if (options.k < 1) throw DomainError("k must be >= 1");
  if (options.bins.empty()) throw ConfigError("at least one bin is required");
  {
    std::unordered_set<ConfidenceBin> unique(options.bins.begin(),
                                             options.bins.end());
    if (unique.size() != options.bins.size()) {
      throw ConfigError("bins must not repeat");
    }
  }

  std::unordered_map<std::string_view, const RunResult*> by_query;
  by_query.reserve(run.size());
  for (const auto& r : run) {
    if (!by_query.emplace(r.query, &r).second) {
      throw IngestError("duplicate query in run: " + r.query);
    }
  }

  MetricsReport report;
  report.k = options.k;
  report.bins = options.bins;
  report.metrics = report_metrics(options.k, options.bins);

  std::vector<std::pair<const std::string*, const RelevantIds*>> queries;
  queries.reserve(qrels.entries.size());
  for (const auto& [query, ids] : qrels.entries) queries.emplace_back(&query, &ids);

  report.per_query.resize(queries.size());
  parallel_for_chunks(queries.size(), options.threads,
                      [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto& [query, relevant] = queries[i];
      auto& qm = report.per_query[i];
      qm.query = *query;
      const auto it = by_query.find(*query);
      qm.in_run = it != by_query.end();
      qm.values.reserve(report.metrics.size());
      for (const auto& m : report.metrics) {
        if (!qm.in_run) {
          // Unanswered query: recall 0, precision undefined.
          qm.values.push_back(m.kind == MetricKind::kRecall
                                  ? Fraction{0, relevant->size()}
                                  : Fraction{});
          continue;
        }
        const auto& ranked = it->second->ranked;
        qm.values.push_back(m.kind == MetricKind::kRecall
                                ? recall_fraction(*relevant, ranked, m.k, m.bin)
                                : precision_fraction(*relevant, ranked, m.k, m.bin));
      }
    }
  });

  report.counts.qrels_queries = queries.size();
  for (const auto& qm : report.per_query) {
    if (qm.in_run) {
      ++report.counts.evaluated;
    } else {
      ++report.counts.missing_from_run;
    }
  }
  for (const auto& r : run) {
    if (!qrels.find(r.query)) ++report.counts.run_without_qrels;
  }

  std::vector<Fraction> column(report.per_query.size());
  for (std::size_t m = 0; m < report.metrics.size(); ++m) {
    for (std::size_t q = 0; q < report.per_query.size(); ++q) {
      column[q] = report.per_query[q].values[m];
    }
    report.aggregate.push_back({aggregate(column, AggregateMode::kMicro),
                                aggregate(column, AggregateMode::kMacro)});
  }
  return report;
}

std::string report_to_json(const MetricsReport& report, bool include_per_query,
                           int indent) {
  detail::OrderedJson root;
  root["k"] = report.k;
  auto& bins = root["bins"] = detail::OrderedJson::array();
  for (const auto b : report.bins) bins.push_back(std::string(to_string(b)));
  root["counts"] = {
      {"qrels_queries", report.counts.qrels_queries},
      {"evaluated", report.counts.evaluated},
      {"missing_from_run", report.counts.missing_from_run},
      {"run_without_qrels", report.counts.run_without_qrels},
  };
  auto& agg = root["aggregate"] = detail::OrderedJson::object();
  for (std::size_t i = 0; i < report.metrics.size(); ++i) {
    detail::OrderedJson entry;
    entry["micro"] = optional_json(report.aggregate[i].micro);
    entry["macro"] = optional_json(report.aggregate[i].macro);
    agg[report.metrics[i].name()] = std::move(entry);
  }
  if (include_per_query) {
    auto& rows = root["per_query"] = detail::OrderedJson::array();
    for (const auto& qm : report.per_query) {
      detail::OrderedJson row;
      row["query"] = qm.query;
      row["in_run"] = qm.in_run;
      auto& values = row["metrics"] = detail::OrderedJson::object();
      for (std::size_t i = 0; i < report.metrics.size(); ++i) {
        values[report.metrics[i].name()] = optional_json(qm.values[i].value());
      }
      rows.push_back(std::move(row));
    }
  }
  return root.dump(indent, ' ', false, nlohmann::json::error_handler_t::strict);
}

MetricsReport report_from_json(std::string_view json) {
  try {
    const auto root = detail::OrderedJson::parse(json);
    MetricsReport report;
    report.k = root.at("k").get<std::size_t>();
    for (const auto& b : root.at("bins")) {
      const auto bin = parse_bin(b.get<std::string>());
      if (!bin) throw IngestError("unknown bin in report: " + b.dump());
      report.bins.push_back(*bin);
    }
    const auto& counts = root.at("counts");
    report.counts.qrels_queries = counts.at("qrels_queries").get<std::size_t>();
    report.counts.evaluated = counts.at("evaluated").get<std::size_t>();
    report.counts.missing_from_run = counts.at("missing_from_run").get<std::size_t>();
    report.counts.run_without_qrels =
        counts.at("run_without_qrels").get<std::size_t>();
    for (const auto& [name, entry] : root.at("aggregate").items()) {
      const auto id = parse_metric_name(name);
      if (!id) throw IngestError("unknown metric in report: " + name);
      report.metrics.push_back(*id);
      report.aggregate.push_back({optional_from_json(entry.at("micro")),
                                  optional_from_json(entry.at("macro"))});
    }
    return report;
  } catch (const detail::Json::exception& e) {
    throw IngestError(fmt::format("malformed report JSON: {}", e.what()));
  }
}

MetricsReport read_report(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  const std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  try {
    return report_from_json(text);
  } catch (const IngestError& e) {
    throw IngestError(path.string() + ": " + e.what());
  }
}

std::string render_report_table(const MetricsReport& report) {
  std::size_t width = std::string_view("metric").size();
  for (const auto& m : report.metrics) width = std::max(width, m.name().size());
  std::string out = fmt::format("{:<{}}  {:>8}  {:>8}\n", "metric", width,
                                "micro", "macro");
  for (std::size_t i = 0; i < report.metrics.size(); ++i) {
    out += fmt::format("{:<{}}  {:>8}  {:>8}\n", report.metrics[i].name(), width,
                       format_value(report.aggregate[i].micro),
                       format_value(report.aggregate[i].macro));
  }
  out += fmt::format(
      "queries: {} in qrels, {} evaluated, {} missing from run, {} run-only\n",
      report.counts.qrels_queries, report.counts.evaluated,
      report.counts.missing_from_run, report.counts.run_without_qrels);
  return out;
}

bool scores_nonincreasing(const RunResult& run) {
  for (std::size_t i = 1; i < run.ranked.size(); ++i) {
    if (run.ranked[i].score > run.ranked[i - 1].score) return false;
  }
  return true;
}

RunLoadResult load_run(const std::filesystem::path& path) {
  RunLoadResult result;
  std::unordered_set<std::string> queries;
  detail::for_each_line(path, [&](std::string_view line, std::size_t number) {
    if (line.empty()) return;
    const auto fail = [&](const std::string& what) {
      return IngestError(fmt::format("{}:{}: {}", path.string(), number, what));
    };
    RunResult run;
    try {
      const auto obj = detail::Json::parse(line);
      run.query = normalize_query(obj.at("query").get<std::string>());
      std::unordered_set<std::string> ids;
      for (const auto& item : obj.at("results")) {
        RankedEntity e;
        e.entity_id = item.at("entity_id").get<std::string>();
        e.score = item.at("score").get<double>();
        const auto bin = parse_bin(item.at("bin").get<std::string>());
        if (!bin) throw fail("unknown bin: " + item.at("bin").dump());
        e.bin = *bin;
        if (!ids.insert(e.entity_id).second) {
          throw fail("duplicate entity " + e.entity_id + " for query: " + run.query);
        }
        run.ranked.push_back(std::move(e));
      }
    } catch (const detail::Json::exception& e) {
      throw fail(e.what());
    }
    if (!queries.insert(run.query).second) {
      throw fail("duplicate query in run: " + run.query);
    }
    if (!scores_nonincreasing(run)) ++result.nonmonotone;
    result.runs.push_back(std::move(run));
  });
  return result;
}

void write_run_jsonl(std::span<const RunResult> runs,
                     const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  for (const auto& run : runs) {
    detail::OrderedJson obj;
    obj["query"] = run.query;
    auto& results = obj["results"] = detail::OrderedJson::array();
    for (const auto& e : run.ranked) {
      detail::OrderedJson item;
      item["entity_id"] = e.entity_id;
      item["score"] = e.score;
      item["bin"] = std::string(to_string(e.bin));
      results.push_back(std::move(item));
    }
    out << detail::dump_line(obj) << '\n';
  }
  detail::finish_output(out, path);
}

}  // namespace erkit
