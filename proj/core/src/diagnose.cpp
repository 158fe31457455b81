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

#include "erkit/diagnose.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "erkit/error.hpp"
#include "jsonl.hpp"

namespace erkit {

namespace {

std::string_view mode_name(AggregateMode mode) {
  return mode == AggregateMode::kMicro ? "micro" : "macro";
}

std::string signed_fixed(double value, std::string_view suffix) {
  const char sign = value < 0.0 ? '-' : '+';
  return fmt::format("{}{:.2f}{}", sign, std::abs(value), suffix);
}

std::string headline_label(const MetricId& id) {
  // "precision@5@high" -> "Precision@5@High"
  std::string text = fmt::format(
      "{}@{}", id.kind == MetricKind::kRecall ? "Recall" : "Precision", id.k);
  if (id.bin) {
    std::string bin(to_string(*id.bin));
    bin[0] = static_cast<char>(bin[0] - 'a' + 'A');
    text += "@" + bin;
  }
  return text;
}

std::vector<MetricId> headline_metrics(std::size_t k) {
  return {{MetricKind::kRecall, k, ConfidenceBin::kHigh},
          {MetricKind::kPrecision, k, ConfidenceBin::kHigh},
          {MetricKind::kPrecision, 1, ConfidenceBin::kHigh}};
}

detail::OrderedJson optional_json(const std::optional<double>& v) {
  return v ? detail::OrderedJson(*v) : detail::OrderedJson(nullptr);
}

}  // namespace

std::string_view to_string(Category category) {
  switch (category) {
    case Category::kSuccess:
      return "success";
    case Category::kBinningMiss:
      return "binning_miss";
    case Category::kRankingMiss:
      return "ranking_miss";
    case Category::kRetrievalMiss:
      return "retrieval_miss";
  }
  return "retrieval_miss";
}

Diagnosis classify_query(const RelevantIds& relevant, const RunResult& run,
                         std::size_t k, ConfidenceBin target_bin) {
  if (relevant.empty()) {
    throw DomainError("cannot classify query with no relevant entities: " +
                      run.query);
  }
  if (k < 1) throw DomainError("k must be >= 1");

  Diagnosis d;
  d.query = run.query;
  bool in_top_k = false;
  bool meets_target = false;
  for (std::size_t i = 0; i < run.ranked.size(); ++i) {
    const auto& e = run.ranked[i];
    if (!relevant.contains(e.entity_id)) continue;
    if (!d.best_rank) {
      d.best_rank = i + 1;
      d.best_bin = e.bin;
    }
    if (i < k) {
      in_top_k = true;
      if (e.bin >= target_bin) {
        meets_target = true;
        break;
      }
    } else {
      break;
    }
  }
  if (meets_target) {
    d.category = Category::kSuccess;
  } else if (in_top_k) {
    d.category = Category::kBinningMiss;
  } else if (d.best_rank) {
    d.category = Category::kRankingMiss;
  } else {
    d.category = Category::kRetrievalMiss;
  }
  return d;
}

double DiagnosisSummary::fraction(Category c) const {
  if (diagnoses.empty()) return 0.0;
  return static_cast<double>(count(c)) / static_cast<double>(diagnoses.size());
}

DiagnosisSummary diagnose_run(const RelevanceSet& qrels,
                              std::span<const RunResult> run, std::size_t k,
                              ConfidenceBin target_bin) {
  if (k < 1) throw DomainError("k must be >= 1");
  std::unordered_map<std::string_view, const RunResult*> by_query;
  for (const auto& r : run) by_query.emplace(r.query, &r);

  DiagnosisSummary summary;
  summary.k = k;
  summary.target_bin = target_bin;
  std::size_t direct_hits = 0;
  for (const auto& [query, relevant] : qrels.entries) {
    const auto it = by_query.find(query);
    if (it == by_query.end()) {
      Diagnosis d;
      d.query = query;
      d.category = Category::kRetrievalMiss;
      summary.diagnoses.push_back(std::move(d));
    } else {
      const RunResult& r = *it->second;
      summary.diagnoses.push_back(classify_query(relevant, r, k, target_bin));
      bool hit = false;
      const std::size_t depth = std::min(k, r.ranked.size());
      for (std::size_t i = 0; i < depth; ++i) {
        const auto& e = r.ranked[i];
        if (!relevant.contains(e.entity_id)) continue;
        switch (e.bin) {
          case ConfidenceBin::kHigh:
            ++summary.hits_high;
            break;
          case ConfidenceBin::kMedium:
            ++summary.hits_medium;
            break;
          case ConfidenceBin::kLow:
            ++summary.hits_low;
            break;
        }
        hit = hit || e.bin >= target_bin;
      }
      if (hit) ++direct_hits;
    }
    ++summary.counts[static_cast<std::size_t>(summary.diagnoses.back().category)];
  }
  summary.hit_rate = summary.diagnoses.empty()
                         ? 0.0
                         : static_cast<double>(direct_hits) /
                               static_cast<double>(summary.diagnoses.size());
  return summary;
}

void write_diagnoses_jsonl(const DiagnosisSummary& summary,
                           const std::filesystem::path& path) {
  auto out = detail::open_output(path);
  for (const auto& d : summary.diagnoses) {
    detail::OrderedJson obj;
    obj["query"] = d.query;
    obj["category"] = std::string(to_string(d.category));
    obj["best_rank"] = d.best_rank ? detail::OrderedJson(*d.best_rank)
                                   : detail::OrderedJson(nullptr);
    obj["best_bin"] = d.best_bin ? detail::OrderedJson(std::string(to_string(*d.best_bin)))
                                 : detail::OrderedJson(nullptr);
    out << detail::dump_line(obj) << '\n';
  }
  detail::finish_output(out, path);
}

std::string summary_to_json(const DiagnosisSummary& summary, int indent) {
  detail::OrderedJson root;
  root["k"] = summary.k;
  root["target_bin"] = std::string(to_string(summary.target_bin));
  root["queries"] = summary.queries();
  detail::OrderedJson counts = detail::OrderedJson::object();
  detail::OrderedJson fractions = detail::OrderedJson::object();
  for (const auto c : kAllCategories) {
    counts[std::string(to_string(c))] = summary.count(c);
    fractions[std::string(to_string(c))] = summary.fraction(c);
  }
  root["counts"] = std::move(counts);
  root["fractions"] = std::move(fractions);
  root["relevant_hits_in_top_k_by_bin"] = {
      {"high", summary.hits_high},
      {"medium", summary.hits_medium},
      {"low", summary.hits_low},
  };
  root["consistency"] = {
      {"success_fraction", summary.fraction(Category::kSuccess)},
      {"hit_rate", summary.hit_rate},
      {"consistent", summary.consistent()},
  };
  return root.dump(indent, ' ', false, nlohmann::json::error_handler_t::strict);
}

DeltaReport compare_reports(const MetricsReport& baseline,
                            const MetricsReport& candidate) {
  if (baseline.k != candidate.k) {
    throw ConfigError(fmt::format("cannot compare reports with k={} and k={}",
                                  baseline.k, candidate.k));
  }
  auto sorted_bins = [](std::vector<ConfidenceBin> bins) {
    std::sort(bins.begin(), bins.end());
    return bins;
  };
  if (sorted_bins(baseline.bins) != sorted_bins(candidate.bins)) {
    throw ConfigError("cannot compare reports evaluated over different bins");
  }

  // Headline columns first, then the remaining metrics in baseline order.
  std::vector<MetricId> order;
  for (const auto& id : headline_metrics(baseline.k)) {
    if (baseline.find(id.name())) order.push_back(id);
  }
  for (const auto& id : baseline.metrics) {
    if (std::find(order.begin(), order.end(), id) == order.end()) {
      order.push_back(id);
    }
  }

  DeltaReport delta;
  delta.k = baseline.k;
  for (const auto& id : order) {
    const std::string name = id.name();
    const AggregateValue* b = baseline.find(name);
    const AggregateValue* c = candidate.find(name);
    for (const auto mode : {AggregateMode::kMacro, AggregateMode::kMicro}) {
      DeltaRow row;
      row.metric = name;
      row.mode = mode;
      if (b) row.baseline = mode == AggregateMode::kMicro ? b->micro : b->macro;
      if (c) row.candidate = mode == AggregateMode::kMicro ? c->micro : c->macro;
      if (row.comparable()) {
        const double diff = *row.candidate - *row.baseline;
        row.absolute_pp = diff * 100.0;
        if (*row.baseline != 0.0) row.relative_pct = diff / *row.baseline * 100.0;
      }
      delta.rows.push_back(std::move(row));
    }
  }
  return delta;
}

std::string format_signed_percent(double value) {
  return signed_fixed(value, "%");
}

std::string format_signed_pp(double value) { return signed_fixed(value, "pp"); }

std::string delta_to_json(const DeltaReport& delta, int indent) {
  detail::OrderedJson root;
  root["k"] = delta.k;
  auto& rows = root["rows"] = detail::OrderedJson::array();
  for (const auto& r : delta.rows) {
    detail::OrderedJson row;
    row["metric"] = r.metric;
    row["mode"] = std::string(mode_name(r.mode));
    row["baseline"] = optional_json(r.baseline);
    row["candidate"] = optional_json(r.candidate);
    row["comparable"] = r.comparable();
    row["absolute_pp"] = optional_json(r.absolute_pp);
    row["relative_pct"] = optional_json(r.relative_pct);
    row["absolute"] = r.absolute_pp
                          ? detail::OrderedJson(format_signed_pp(*r.absolute_pp))
                          : detail::OrderedJson(nullptr);
    row["relative"] = r.relative_pct
                          ? detail::OrderedJson(format_signed_percent(*r.relative_pct))
                          : detail::OrderedJson(nullptr);
    rows.push_back(std::move(row));
  }
  return root.dump(indent, ' ', false, nlohmann::json::error_handler_t::strict);
}

std::string render_delta_table(const DeltaReport& delta) {
  std::size_t width = std::string_view("metric").size();
  for (const auto& r : delta.rows) width = std::max(width, r.metric.size());
  const auto value = [](const std::optional<double>& v) {
    return v ? fmt::format("{:.4f}", *v) : std::string("n/a");
  };
  std::string out =
      fmt::format("{:<{}}  {:<5}  {:>9}  {:>9}  {:>10}  {:>10}\n", "metric",
                  width, "mode", "baseline", "candidate", "abs", "rel");
  for (const auto& r : delta.rows) {
    std::string abs_text = "incomparable";
    std::string rel_text = "incomparable";
    if (r.comparable()) {
      abs_text = format_signed_pp(*r.absolute_pp);
      rel_text = r.relative_pct ? format_signed_percent(*r.relative_pct) : "n/a";
    }
    out += fmt::format("{:<{}}  {:<5}  {:>9}  {:>9}  {:>10}  {:>10}\n", r.metric,
                       width, mode_name(r.mode), value(r.baseline),
                       value(r.candidate), abs_text, rel_text);
  }
  return out;
}

std::string render_headline_table(const DeltaReport& delta,
                                  std::string_view label) {
  const auto columns = headline_metrics(delta.k);
  std::vector<std::string> headers;
  for (const auto& c : columns) headers.push_back(headline_label(c));

  const std::size_t label_width =
      std::max<std::size_t>(std::string_view("Experiment").size(), label.size() + 8);
  std::string out = fmt::format("{:<{}}", "Experiment", label_width);
  for (const auto& h : headers) out += fmt::format("  {:>18}", h);
  out += '\n';
  for (const auto mode : {AggregateMode::kMacro, AggregateMode::kMicro}) {
    out += fmt::format("{:<{}}", fmt::format("{} ({})", label, mode_name(mode)),
                       label_width);
    for (const auto& c : columns) {
      std::string cell = "n/a";
      const std::string name = c.name();
      const auto it = std::find_if(delta.rows.begin(), delta.rows.end(),
                                   [&](const DeltaRow& r) {
                                     return r.metric == name && r.mode == mode;
                                   });
      if (it != delta.rows.end() && it->relative_pct) {
        cell = format_signed_percent(*it->relative_pct);
      } else if (it != delta.rows.end() && !it->comparable()) {
        cell = "incomparable";
      }
      out += fmt::format("  {:>18}", cell);
    }
    out += '\n';
  }
  return out;
}

}  // namespace erkit
