/*
 * Copyright 2026-present the regsim authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace regsim::csv {

// Shortest round-trip decimal representation; reparsing yields the same
// double, which keeps exported files byte-stable and reloadable bit-exactly.
inline std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

// Fixed two-decimal formatting for money columns.
inline std::string format_money(double dollars) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", dollars);
  return std::string(buf);
}

// Strict full-consume parse. Rejects empty fields, trailing junk, and the
// textual inf/nan spellings.
inline std::optional<double> parse_double(std::string_view field) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = field.data() + field.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

inline std::optional<long long> parse_int(std::string_view field) {
  long long value = 0;
  const char* begin = field.data();
  const char* end = field.data() + field.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end) {
    return std::nullopt;
  }
  return value;
}

// Split on commas. The formats in this project never quote or embed commas.
inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

inline std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') {
    line.remove_suffix(1);
  }
  return line;
}

}  // namespace regsim::csv
