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

#include <map>

#include "erkit/diagnose.hpp"
#include "erkit/metrics.hpp"
#include "erkit/simulate.hpp"

namespace {

struct Fixture {
  erkit::RelevanceSet truth;
  std::vector<erkit::RunResult> run;
};

const Fixture& fixture(std::size_t n_queries) {
  static std::map<std::size_t, Fixture> cache;
  auto it = cache.find(n_queries);
  if (it == cache.end()) {
    erkit::SimConfig config;
    config.n_titles = n_queries * 2;
    config.n_queries = n_queries;
    config.replays = 1;
    const auto sim = erkit::simulate(config, 0);
    it = cache.emplace(n_queries, Fixture{erkit::truth_relevance(sim.queries), sim.run})
             .first;
  }
  return it->second;
}

void BM_EvaluateRun(benchmark::State& state) {
  const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
  erkit::EvalOptions options;
  options.threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(erkit::evaluate_run(f.truth, f.run, options));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EvaluateRun)->Args({500, 1})->Args({2000, 1})->Args({2000, 4});

void BM_DiagnoseRun(benchmark::State& state) {
  const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(erkit::diagnose_run(f.truth, f.run, 5));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DiagnoseRun)->Arg(2000);

}  // namespace
