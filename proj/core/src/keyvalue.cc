// Copyright 2026 The scdmetric Authors.
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

#include "scd/keyvalue.h"

#include <charconv>
#include <string>

#include <fmt/core.h>

#include "binary_io.h"
#include "scd/errors.h"

namespace scd {
std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

KeyValues ParseKeyValues(std::string_view text, const std::string& source) {
  KeyValues out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);

    line = Trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(fmt::format("{}:{}: expected key=value", source, line_no));
    }
    std::string_view key = Trim(line.substr(0, eq));
    if (key.empty()) {
      throw ParseError(fmt::format("{}:{}: empty key", source, line_no));
    }
    out[std::string(key)] = std::string(Trim(line.substr(eq + 1)));
  }
  return out;
}

KeyValues ReadKeyValueFile(const std::string& path) {
  return ParseKeyValues(internal::ReadFileBytes(path), path);
}

void WriteKeyValueFile(const KeyValues& values, const std::string& path) {
  std::string text;
  for (const auto& [key, value] : values) {
    text += key;
    text += '=';
    text += value;
    text += '\n';
  }
  internal::WriteFileAtomic(path, text);
}

double ParseDouble(std::string_view text, std::string_view what) {
  // std::from_chars for double is available in libstdc++ 11.
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ParseError(fmt::format("{}: '{}' is not a number", what, text));
  }
  return v;
}

long long ParseInt(std::string_view text, std::string_view what) {
  long long v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ParseError(fmt::format("{}: '{}' is not an integer", what, text));
  }
  return v;
}

bool ParseBool(std::string_view text, std::string_view what) {
  if (text == "1" || text == "true" || text == "yes") return true;
  if (text == "0" || text == "false" || text == "no") return false;
  throw ParseError(fmt::format("{}: '{}' is not a boolean", what, text));
}

}  // namespace scd
