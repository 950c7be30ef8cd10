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

#include "scd/constraints.h"

#include <algorithm>

#include <fmt/core.h>

#include "binary_io.h"
#include "scd/errors.h"

namespace scd {

std::size_t ConstraintSet::similar_count() const {
  return static_cast<std::size_t>(std::count_if(
      items.begin(), items.end(), [](const Constraint& c) { return c.similar(); }));
}

Constraint MakeConstraint(const EmbeddingStore& store, std::size_t row1,
                          std::size_t row2, int label) {
  if (row1 >= store.size() || row2 >= store.size()) {
    throw DataError(fmt::format("constraint row ({}, {}) outside store of {} rows",
                                row1, row2, store.size()));
  }
  if (row1 == row2) {
    throw DataError(fmt::format("constraint pairs row '{}' with itself",
                                store.entry(row1).row_id));
  }
  if (label != 0 && label != 1) {
    throw ParseError(fmt::format("constraint label must be 0 or 1, got {}", label));
  }
  return {row1, row2, label};
}

ConstraintSet ParseConstraints(std::string_view text, const std::string& source,
                               const EmbeddingStore& store) {
  ConstraintSet set;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos || line.find('\t', t2 + 1) != std::string_view::npos) {
      throw ParseError(fmt::format("{}:{}: expected id1<TAB>id2<TAB>label",
                                   source, line_no));
    }
    const std::string_view id1 = line.substr(0, t1);
    const std::string_view id2 = line.substr(t1 + 1, t2 - t1 - 1);
    const std::string_view label = line.substr(t2 + 1);
    if (label != "0" && label != "1") {
      throw ParseError(fmt::format("{}:{}: label must be 0 or 1, got '{}'",
                                   source, line_no, label));
    }
    if (id1 == id2) {
      throw DataError(fmt::format("{}:{}: constraint pairs '{}' with itself",
                                  source, line_no, id1));
    }
    auto r1 = store.FindRow(id1);
    auto r2 = store.FindRow(id2);
    if (!r1 || !r2) {
      throw DataError(fmt::format("{}:{}: unknown embedding id '{}'", source,
                                  line_no, r1 ? id2 : id1));
    }
    set.items.push_back({*r1, *r2, label == "1" ? 1 : 0});
  }
  return set;
}

ConstraintSet ReadConstraints(const std::string& path,
                              const EmbeddingStore& store) {
  return ParseConstraints(internal::ReadFileBytes(path), path, store);
}

void WriteConstraints(const ConstraintSet& set, const EmbeddingStore& store,
                      const std::string& path) {
  std::string text;
  for (const auto& c : set.items) {
    text += fmt::format("{}\t{}\t{}\n", store.entry(c.row1).row_id,
                        store.entry(c.row2).row_id, c.label);
  }
  internal::WriteFileAtomic(path, text);
}

}  // namespace scd
