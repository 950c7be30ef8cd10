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

#ifndef SCD_KEYVALUE_H_
#define SCD_KEYVALUE_H_

#include <map>
#include <string>
#include <string_view>

namespace scd {

using KeyValues = std::map<std::string, std::string>;

// "key=value" per line. Blank lines and lines starting with '#' are skipped;
// whitespace around keys and values is trimmed. Later keys win.
// Strips spaces, tabs and carriage returns from both ends.
std::string_view Trim(std::string_view s);

KeyValues ParseKeyValues(std::string_view text, const std::string& source);
KeyValues ReadKeyValueFile(const std::string& path);
void WriteKeyValueFile(const KeyValues& values, const std::string& path);

double ParseDouble(std::string_view text, std::string_view what);
long long ParseInt(std::string_view text, std::string_view what);
bool ParseBool(std::string_view text, std::string_view what);

}  // namespace scd

#endif  // SCD_KEYVALUE_H_
