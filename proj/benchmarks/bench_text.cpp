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

#include <string>

#include "erkit/text.hpp"

namespace {

void BM_EditDistance(benchmark::State& state) {
  const std::string a(static_cast<std::size_t>(state.range(0)), 'a');
  std::string b = a;
  for (std::size_t i = 0; i < b.size(); i += 3) b[i] = 'b';
  for (auto _ : state) benchmark::DoNotOptimize(erkit::edit_distance(a, b));
}
BENCHMARK(BM_EditDistance)->Arg(8)->Arg(24)->Arg(64);

void BM_NormalizeQuery(benchmark::State& state) {
  const std::string raw = "  The   Office\tUS  Season 3 ";
  for (auto _ : state) benchmark::DoNotOptimize(erkit::normalize_query(raw));
}
BENCHMARK(BM_NormalizeQuery);

}  // namespace
