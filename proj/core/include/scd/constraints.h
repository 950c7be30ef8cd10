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

#ifndef SCD_CONSTRAINTS_H_
#define SCD_CONSTRAINTS_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "scd/store.h"

namespace scd {

// A labelled pair of store rows. label 1: the target word has the same
// meaning in both occurrences; label 0: different meanings.
struct Constraint {
  std::size_t row1 = 0;
  std::size_t row2 = 0;
  int label = 0;

  bool similar() const { return label == 1; }
};

struct ConstraintSet {
  std::vector<Constraint> items;

  std::size_t size() const { return items.size(); }
  bool empty() const { return items.empty(); }
  std::size_t similar_count() const;
  std::size_t dissimilar_count() const {
    return items.size() - similar_count();
  }
};

// Validates rows against the store and the row1 != row2 invariant.
Constraint MakeConstraint(const EmbeddingStore& store, std::size_t row1,
                          std::size_t row2, int label);

// One "id1\tid2\tlabel" record per line; ids resolve through the store
// manifest. Errors carry the line number.
ConstraintSet ParseConstraints(std::string_view text, const std::string& source,
                               const EmbeddingStore& store);
ConstraintSet ReadConstraints(const std::string& path,
                              const EmbeddingStore& store);
void WriteConstraints(const ConstraintSet& set, const EmbeddingStore& store,
                      const std::string& path);

}  // namespace scd

#endif  // SCD_CONSTRAINTS_H_
