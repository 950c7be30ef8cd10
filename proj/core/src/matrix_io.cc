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

#include "scd/matrix_io.h"

#include <fmt/core.h>

#include "binary_io.h"
#include "scd/errors.h"
#include "scd/keyvalue.h"

namespace scd {

void WriteMetric(const MahalanobisMatrix& a, const std::string& path) {
  internal::ByteWriter w;
  w.PutBytes("SCDA");
  w.PutU32(kMatrixFormatVersion);
  w.PutU8(static_cast<std::uint8_t>(a.mode()));
  const auto d = static_cast<Eigen::Index>(a.dim());
  w.PutU32(static_cast<std::uint32_t>(d));
  if (a.is_diagonal()) {
    for (Eigen::Index i = 0; i < d; ++i) w.PutF64(a.diagonal()(i));
  } else {
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) w.PutF64(a.full()(i, j));
    }
  }
  internal::WriteFileAtomic(path, w.bytes());
}

MahalanobisMatrix ReadMetric(const std::string& path) {
  const std::string bytes = internal::ReadFileBytes(path);
  internal::ByteReader r(bytes, path);
  if (r.GetBytes(4) != "SCDA") {
    throw FormatError(fmt::format("{}: not a metric file (bad magic)", path));
  }
  const std::uint32_t version = r.GetU32();
  if (version != kMatrixFormatVersion) {
    throw FormatError(fmt::format("{}: unsupported metric format version {}",
                                  path, version));
  }
  const std::uint8_t mode = r.GetU8();
  if (mode > 1) {
    throw FormatError(fmt::format("{}: unknown metric mode flag {}", path, mode));
  }
  const std::uint32_t d = r.GetU32();
  if (d == 0) throw FormatError(fmt::format("{}: metric dimension is zero", path));
  const auto n = static_cast<Eigen::Index>(d);

  if (mode == 1) {
    Vector diag(n);
    for (Eigen::Index i = 0; i < n; ++i) diag(i) = r.GetF64();
    r.ExpectEnd();
    return MahalanobisMatrix::Diagonal(std::move(diag));
  }
  Matrix full(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) full(i, j) = r.GetF64();
  }
  r.ExpectEnd();
  return MahalanobisMatrix::Full(std::move(full));
}

std::string MetadataPathFor(const std::string& metric_path) {
  return metric_path + ".meta";
}

void WriteMetricMetadata(const MetricMetadata& meta, const std::string& path) {
  KeyValues kv;
  kv["gamma"] = fmt::format("{}", meta.gamma);
  kv["upper_bound"] = fmt::format("{}", meta.upper_bound);
  kv["lower_bound"] = fmt::format("{}", meta.lower_bound);
  kv["sweeps"] = fmt::format("{}", meta.sweeps);
  kv["converged"] = meta.converged ? "true" : "false";
  WriteKeyValueFile(kv, path);
}

MetricMetadata ReadMetricMetadata(const std::string& path) {
  const KeyValues kv = ReadKeyValueFile(path);
  auto get = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) {
      throw FormatError(fmt::format("{}: missing key '{}'", path, key));
    }
    return it->second;
  };
  MetricMetadata meta;
  meta.gamma = ParseDouble(get("gamma"), "gamma");
  meta.upper_bound = ParseDouble(get("upper_bound"), "upper_bound");
  meta.lower_bound = ParseDouble(get("lower_bound"), "lower_bound");
  meta.sweeps = static_cast<int>(ParseInt(get("sweeps"), "sweeps"));
  meta.converged = ParseBool(get("converged"), "converged");
  return meta;
}

}  // namespace scd
