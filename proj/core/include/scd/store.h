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

#ifndef SCD_STORE_H_
#define SCD_STORE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "scd/metric.h"

namespace scd {

inline constexpr std::uint32_t kStoreFormatVersion = 1;
inline constexpr std::size_t kStoreHeaderBytes = 21;

struct ManifestEntry {
  std::string row_id;
  std::string word;
  std::string corpus_id;
  std::string sentence_id;

  bool operator==(const ManifestEntry&) const = default;
};

// Word-occurrence embeddings with per-row metadata. Rows are float32,
// row-major and contiguous; arithmetic callers widen to double via Row().
class EmbeddingStore {
 public:
  explicit EmbeddingStore(std::size_t dim);
  // Validates: values.size() == manifest.size() * dim, all values finite,
  // row ids unique.
  EmbeddingStore(std::size_t dim, std::vector<float> values,
                 std::vector<ManifestEntry> manifest);

  void Append(ManifestEntry entry, std::span<const float> values);
  void Append(ManifestEntry entry, const Eigen::Ref<const Vector>& values);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return manifest_.size(); }

  std::span<const float> RawRow(std::size_t i) const {
    return {values_.data() + i * dim_, dim_};
  }
  Vector Row(std::size_t i) const;
  const ManifestEntry& entry(std::size_t i) const { return manifest_[i]; }
  const std::vector<ManifestEntry>& manifest() const { return manifest_; }
  const std::vector<float>& values() const { return values_; }

  std::optional<std::size_t> FindRow(std::string_view row_id) const;
  // Throws DataError naming the id.
  std::size_t RequireRow(std::string_view row_id) const;

  // Rows whose manifest matches (word, corpus_id), in store order.
  std::vector<std::size_t> RowsFor(std::string_view word,
                                   std::string_view corpus_id) const;

  bool operator==(const EmbeddingStore& other) const {
    return dim_ == other.dim_ && values_ == other.values_ &&
           manifest_ == other.manifest_;
  }

 private:
  void Index(std::size_t row);

  std::size_t dim_;
  std::vector<float> values_;
  std::vector<ManifestEntry> manifest_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

// Binary payload: "SCDE", version u32, d u32, N u64, float width u8 (4),
// then N*d little-endian float32 values. The manifest lives in a sidecar
// text file "<path>.manifest" with one "row_id\tword\tcorpus_id\tsentence_id"
// line per row.
std::string ManifestPathFor(const std::string& store_path);
EmbeddingStore ReadStore(const std::string& path);
void WriteStore(const EmbeddingStore& store, const std::string& path);

}  // namespace scd

#endif  // SCD_STORE_H_
