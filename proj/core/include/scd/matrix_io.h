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

#ifndef SCD_MATRIX_IO_H_
#define SCD_MATRIX_IO_H_

#include <cstdint>
#include <string>

#include "scd/metric.h"

namespace scd {

inline constexpr std::uint32_t kMatrixFormatVersion = 1;

// Binary metric file: "SCDA", version u32, mode u8 (0 full, 1 diagonal),
// d u32, then d*d (full) or d (diagonal) float64 values, row-major,
// little-endian.
void WriteMetric(const MahalanobisMatrix& a, const std::string& path);
MahalanobisMatrix ReadMetric(const std::string& path);

// Fit summary stored next to a metric file as "key=value" lines.
struct MetricMetadata {
  double gamma = 1.0;
  double upper_bound = 0.0;
  double lower_bound = 0.0;
  int sweeps = 0;
  bool converged = false;
};

std::string MetadataPathFor(const std::string& metric_path);
void WriteMetricMetadata(const MetricMetadata& meta, const std::string& path);
MetricMetadata ReadMetricMetadata(const std::string& path);

}  // namespace scd

#endif  // SCD_MATRIX_IO_H_
