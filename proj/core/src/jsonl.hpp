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

// Internal file helpers shared by the module readers and writers.

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <string_view>

#include "json.hpp"

namespace erkit::detail {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

std::ifstream open_input(const std::filesystem::path& path);
std::ofstream open_output(const std::filesystem::path& path);

// Calls fn(line, line_number) for every line, with a trailing '\r' removed.
// Blank lines are passed through; callers decide what they mean.
void for_each_line(const std::filesystem::path& path,
                   const std::function<void(std::string_view, std::size_t)>& fn);

// Throws IoError if the stream went bad while writing.
void finish_output(std::ofstream& out, const std::filesystem::path& path);

// Compact single-line dump with a stable number format.
std::string dump_line(const OrderedJson& value);

}  // namespace erkit::detail
