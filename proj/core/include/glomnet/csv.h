// Copyright 2026 The glomnet Authors. All Rights Reserved.
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

/// @file csv.h
/// @brief Minimal comma-separated table reader/writer.
///
/// Fields never contain commas or quotes (ids are opaque tokens), so no
/// quoting is supported. Numbers are written in shortest round-trip form.

#ifndef GLOMNET_CSV_H_
#define GLOMNET_CSV_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace glomnet::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  /// 1-based source line of each row, for diagnostics.
  std::vector<int> lines;
};

/// Reads `path` and checks that its header equals `expected_header`.
Table read(const std::filesystem::path& path,
           const std::vector<std::string>& expected_header);

std::vector<std::string> split(std::string_view line);

double parse_double(std::string_view field, std::string_view what);
long long parse_int(std::string_view field, std::string_view what);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

/// Writes atomically enough for our purposes: the whole text in one go.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace glomnet::csv

#endif  // GLOMNET_CSV_H_
