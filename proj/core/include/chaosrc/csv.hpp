// Copyright 2026 The chaosrc Authors
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

// Minimal CSV helpers shared by the series, metrics and sweep writers.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace chaosrc::csv {

/// Shortest text that parses back to the same double (17 significant digits).
std::string format_double(double v);

/// Parses a double, accepting "inf", "-inf" and "nan". Throws on trailing junk.
double parse_double(std::string_view text);

std::vector<std::string> split_line(std::string_view line);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a named column; throws if absent.
  std::size_t column(std::string_view name) const;
};

Table read_table(std::istream& in);
Table read_table(const std::filesystem::path& path);

/// Writes `text` to `path`, creating parent directories.
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace chaosrc::csv
