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

#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace erkit {

// Lowercases ASCII letters, collapses runs of whitespace into a single space
// and trims both ends. Bytes >= 0x80 pass through untouched.
std::string normalize_query(std::string_view raw);

// Byte-level Levenshtein distance (unit cost insert/delete/substitute).
std::size_t edit_distance(std::string_view a, std::string_view b);

// 1 - edit_distance / max(|a|, |b|); two empty strings are identical (1.0).
double edit_similarity(std::string_view a, std::string_view b);

}  // namespace erkit
