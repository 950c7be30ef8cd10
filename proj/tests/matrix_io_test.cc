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

#include <gtest/gtest.h>

#include <cstring>
#include <random>
#include <string>

#include "scd/errors.h"
#include "scd/fileio.h"
#include "test_support.h"

namespace scd {
namespace {

TEST(MetricFile, FullRoundTripIsExact) {
  testing::TempDir dir;
  std::mt19937_64 rng(1);
  const MahalanobisMatrix a = MahalanobisMatrix::Full(testing::RandomPdMatrix(7, rng));
  WriteMetric(a, dir.Path("m.scda"));
  const MahalanobisMatrix b = ReadMetric(dir.Path("m.scda"));
  EXPECT_EQ(b.mode(), MetricMode::kFull);
  EXPECT_EQ(b.ToDense(), a.ToDense());
}

TEST(MetricFile, DiagonalRoundTripIsExact) {
  testing::TempDir dir;
  Vector diag(3);
  diag << 0.1, 2.0, 1e-300;
  WriteMetric(MahalanobisMatrix::Diagonal(diag), dir.Path("d.scda"));
  const MahalanobisMatrix b = ReadMetric(dir.Path("d.scda"));
  EXPECT_EQ(b.mode(), MetricMode::kDiagonal);
  EXPECT_EQ(b.diagonal(), diag);
}

TEST(MetricFile, LayoutIsLittleEndianHeaderThenValues) {
  testing::TempDir dir;
  Vector diag(2);
  diag << 1.5, -0.25;
  WriteMetric(MahalanobisMatrix::Diagonal(diag), dir.Path("d.scda"));
  const std::string bytes = ReadFile(dir.Path("d.scda"));
  ASSERT_EQ(bytes.size(), 4u + 4u + 1u + 4u + 2u * 8u);
  EXPECT_EQ(bytes.substr(0, 4), "SCDA");
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[8], 1);
  EXPECT_EQ(bytes[9], 2);
  double first = 0.0;
  std::memcpy(&first, bytes.data() + 13, 8);
  EXPECT_EQ(first, 1.5);
}

TEST(MetricFile, RejectsBadMagicVersionAndTruncation) {
  testing::TempDir dir;
  WriteMetric(MahalanobisMatrix::Identity(3), dir.Path("m.scda"));
  const std::string good = ReadFile(dir.Path("m.scda"));

  std::string bad = good;
  bad[0] = 'X';
  WriteFileAtomically(dir.Path("bad.scda"), bad);
  EXPECT_THROW(ReadMetric(dir.Path("bad.scda")), FormatError);

  bad = good;
  bad[4] = 9;
  WriteFileAtomically(dir.Path("bad.scda"), bad);
  EXPECT_THROW(ReadMetric(dir.Path("bad.scda")), FormatError);

  WriteFileAtomically(dir.Path("bad.scda"), good.substr(0, good.size() - 3));
  EXPECT_THROW(ReadMetric(dir.Path("bad.scda")), FormatError);

  WriteFileAtomically(dir.Path("bad.scda"), good + "x");
  EXPECT_THROW(ReadMetric(dir.Path("bad.scda")), FormatError);
}

TEST(MetricFile, MissingFileIsIoError) {
  testing::TempDir dir;
  EXPECT_THROW(ReadMetric(dir.Path("absent.scda")), IoError);
}

TEST(MetricMetadata, RoundTrip) {
  testing::TempDir dir;
  MetricMetadata meta;
  meta.gamma = 0.001;
  meta.upper_bound = 12.345678901234567;
  meta.lower_bound = 98.7;
  meta.sweeps = 17;
  meta.converged = true;
  const std::string path = MetadataPathFor(dir.Path("m.scda"));
  EXPECT_EQ(path, dir.Path("m.scda") + ".meta");
  WriteMetricMetadata(meta, path);
  const MetricMetadata back = ReadMetricMetadata(path);
  EXPECT_EQ(back.gamma, meta.gamma);
  EXPECT_EQ(back.upper_bound, meta.upper_bound);
  EXPECT_EQ(back.lower_bound, meta.lower_bound);
  EXPECT_EQ(back.sweeps, meta.sweeps);
  EXPECT_EQ(back.converged, meta.converged);
}

TEST(MetricMetadata, MissingKeyIsFormatError) {
  testing::TempDir dir;
  WriteFileAtomically(dir.Path("m.meta"), "gamma=1\n");
  EXPECT_THROW(ReadMetricMetadata(dir.Path("m.meta")), FormatError);
}

}  // namespace
}  // namespace scd
