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

#include "scd/store.h"

#include <cmath>

#include <fmt/core.h>

#include "binary_io.h"
#include "scd/errors.h"

namespace scd {
namespace {

void CheckField(const std::string& value, const char* name) {
  if (value.empty() || value.find_first_of("\t\n\r") != std::string::npos) {
    throw ValidationError(fmt::format(
        "manifest field '{}' must be non-empty and free of tabs/newlines: '{}'",
        name, value));
  }
}

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

}  // namespace

EmbeddingStore::EmbeddingStore(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw ShapeError("embedding dimension must be positive");
}

EmbeddingStore::EmbeddingStore(std::size_t dim, std::vector<float> values,
                               std::vector<ManifestEntry> manifest)
    : dim_(dim), values_(std::move(values)), manifest_(std::move(manifest)) {
  if (dim == 0) throw ShapeError("embedding dimension must be positive");
  if (values_.size() != manifest_.size() * dim_) {
    throw DataError(fmt::format(
        "store has {} values but {} manifest rows of dimension {}",
        values_.size(), manifest_.size(), dim_));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw NumericError(fmt::format("store row {} has a non-finite value",
                                     i / dim_));
    }
  }
  by_id_.reserve(manifest_.size());
  for (std::size_t i = 0; i < manifest_.size(); ++i) Index(i);
}

void EmbeddingStore::Index(std::size_t row) {
  const ManifestEntry& e = manifest_[row];
  CheckField(e.row_id, "row_id");
  CheckField(e.word, "word");
  CheckField(e.corpus_id, "corpus_id");
  CheckField(e.sentence_id, "sentence_id");
  if (!by_id_.emplace(e.row_id, row).second) {
    throw DataError(fmt::format("duplicate row id '{}'", e.row_id));
  }
}

void EmbeddingStore::Append(ManifestEntry entry, std::span<const float> values) {
  if (values.size() != dim_) {
    throw ShapeError(fmt::format("row '{}' has {} values, store dimension is {}",
                                 entry.row_id, values.size(), dim_));
  }
  for (float v : values) {
    if (!std::isfinite(v)) {
      throw NumericError(fmt::format("row '{}' has a non-finite value",
                                     entry.row_id));
    }
  }
  manifest_.push_back(std::move(entry));
  try {
    Index(manifest_.size() - 1);
  } catch (...) {
    manifest_.pop_back();
    throw;
  }
  values_.insert(values_.end(), values.begin(), values.end());
}

void EmbeddingStore::Append(ManifestEntry entry,
                            const Eigen::Ref<const Vector>& values) {
  std::vector<float> narrowed(static_cast<std::size_t>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    narrowed[static_cast<std::size_t>(i)] = static_cast<float>(values(i));
  }
  Append(std::move(entry), std::span<const float>(narrowed));
}

Vector EmbeddingStore::Row(std::size_t i) const {
  return Eigen::Map<const Eigen::VectorXf>(values_.data() + i * dim_,
                                           static_cast<Eigen::Index>(dim_))
      .cast<double>();
}

std::optional<std::size_t> EmbeddingStore::FindRow(std::string_view row_id) const {
  auto it = by_id_.find(std::string(row_id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::size_t EmbeddingStore::RequireRow(std::string_view row_id) const {
  if (auto row = FindRow(row_id)) return *row;
  throw DataError(fmt::format("unknown embedding id '{}'", row_id));
}

std::vector<std::size_t> EmbeddingStore::RowsFor(std::string_view word,
                                                 std::string_view corpus_id) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < manifest_.size(); ++i) {
    if (manifest_[i].word == word && manifest_[i].corpus_id == corpus_id) {
      rows.push_back(i);
    }
  }
  return rows;
}

std::string ManifestPathFor(const std::string& store_path) {
  return store_path + ".manifest";
}

EmbeddingStore ReadStore(const std::string& path) {
  const std::string bytes = internal::ReadFileBytes(path);
  internal::ByteReader r(bytes, path);
  if (r.GetBytes(4) != "SCDE") {
    throw FormatError(fmt::format("{}: not an embedding store (bad magic)", path));
  }
  const std::uint32_t version = r.GetU32();
  if (version != kStoreFormatVersion) {
    throw FormatError(fmt::format("{}: unsupported store version {}", path, version));
  }
  const std::uint32_t dim = r.GetU32();
  const std::uint64_t count = r.GetU64();
  const std::uint8_t width = r.GetU8();
  if (dim == 0) throw FormatError(fmt::format("{}: dimension is zero", path));
  if (width != 4) {
    throw FormatError(fmt::format("{}: unsupported float width {}", path, width));
  }
  if (count > r.remaining() / (4ull * dim)) {
    throw FormatError(fmt::format(
        "{}: truncated payload ({} rows of dimension {} need {} bytes, have {})",
        path, count, dim, count * dim * 4, r.remaining()));
  }
  std::vector<float> values(count * dim);
  for (auto& v : values) v = r.GetF32();
  r.ExpectEnd();

  const std::string manifest_path = ManifestPathFor(path);
  const std::string text = internal::ReadFileBytes(manifest_path);
  std::vector<ManifestEntry> manifest;
  manifest.reserve(count);
  std::string_view rest = text;
  std::size_t line_no = 0;
  while (!rest.empty()) {
    ++line_no;
    const auto eol = rest.find('\n');
    std::string_view line = rest.substr(0, eol);
    rest = eol == std::string_view::npos ? std::string_view{} : rest.substr(eol + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto fields = SplitTabs(line);
    if (fields.size() != 4) {
      throw ParseError(fmt::format("{}:{}: expected 4 tab-separated fields, got {}",
                                   manifest_path, line_no, fields.size()));
    }
    manifest.push_back({std::string(fields[0]), std::string(fields[1]),
                        std::string(fields[2]), std::string(fields[3])});
  }
  if (manifest.size() != count) {
    throw DataError(fmt::format("{}: manifest has {} rows but payload has {}",
                                manifest_path, manifest.size(), count));
  }
  return EmbeddingStore(dim, std::move(values), std::move(manifest));
}

void WriteStore(const EmbeddingStore& store, const std::string& path) {
  internal::ByteWriter w;
  w.PutBytes("SCDE");
  w.PutU32(kStoreFormatVersion);
  w.PutU32(static_cast<std::uint32_t>(store.dim()));
  w.PutU64(store.size());
  w.PutU8(4);
  for (float v : store.values()) w.PutF32(v);

  std::string manifest;
  for (const auto& e : store.manifest()) {
    manifest += fmt::format("{}\t{}\t{}\t{}\n", e.row_id, e.word, e.corpus_id,
                            e.sentence_id);
  }
  internal::WriteFileAtomic(ManifestPathFor(path), manifest);
  internal::WriteFileAtomic(path, w.bytes());
}

}  // namespace scd
