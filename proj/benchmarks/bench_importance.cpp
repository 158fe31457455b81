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

#include "erkit/importance.hpp"
#include "erkit/simulate.hpp"

namespace {

void BM_ScoreCatalog(benchmark::State& state) {
  erkit::SimConfig config;
  config.n_titles = static_cast<std::size_t>(state.range(0));
  const auto catalog = erkit::gen_catalog(config);
  const erkit::ImportanceConfig importance;
  const auto threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(erkit::score_catalog(catalog, importance, threads));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ScoreCatalog)->Args({10000, 1})->Args({100000, 1})->Args({100000, 4});

}  // namespace
