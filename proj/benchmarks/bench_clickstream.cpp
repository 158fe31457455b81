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

#include <benchmark/benchmark.h>

#include "erkit/clickstream.hpp"
#include "erkit/simulate.hpp"

namespace {

const std::vector<erkit::ClickEvent>& events() {
  static const auto sim = [] {
    erkit::SimConfig config;
    config.n_queries = 500;
    config.replays = 200;
    return erkit::simulate(config, 0);
  }();
  return sim.events;
}

void BM_AggregatePairs(benchmark::State& state) {
  const auto& ev = events();
  const auto shards = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        erkit::aggregate_pairs_sharded(ev, shards, static_cast<unsigned>(shards)));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ev.size()));
}
BENCHMARK(BM_AggregatePairs)->Arg(1)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_ParseEventLine(benchmark::State& state) {
  const std::string line =
      R"({"query":"Bacdoru Veba","impressions":["tt0000001","tt0000002","tt0000003"],"clicked":"tt0000002","ts":null})";
  for (auto _ : state) benchmark::DoNotOptimize(erkit::parse_event_line(line));
}
BENCHMARK(BM_ParseEventLine);

}  // namespace
