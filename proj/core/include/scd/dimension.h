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

#ifndef SCD_DIMENSION_H_
#define SCD_DIMENSION_H_

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scd/metric.h"
#include "scd/scorer.h"
#include "scd/store.h"

namespace scd {

// Human semantic-change ratings per target word.
struct GoldRatings {
  std::map<std::string, double> entries;

  // Throws DataError naming the word if absent.
  double at(const std::string& word) const;
};

// One "word\trating" per line. Needs at least two finite entries.
GoldRatings ReadGoldRatings(const std::string& path);

// Average (fractional, 1-based) ranks; tied values share the mean rank.
std::vector<double> AverageRanks(std::span<const double> values);

// Spearman's rho as the Pearson correlation of average ranks. Throws
// ValidationError for mismatched lengths, fewer than two values, or a
// constant input (undefined correlation).
double Spearman(std::span<const double> x, std::span<const double> y);

// Element i: mean over all cross pairs of |x_i - y_i|.
Vector DimensionScores(const OccurrenceSet& s1, const OccurrenceSet& s2,
                       const EmbeddingStore& store);

struct DimensionRanking {
  // Spearman correlation of each dimension's scores with the gold ratings.
  // Dimensions whose scores are constant across words get 0 and are
  // flagged in `undefined`.
  Vector correlations;
  std::vector<bool> undefined;
  // Dimensions sorted by |correlation| descending, ties by lower index.
  std::vector<std::size_t> order;
};

// per_word_scores has one row per word in `words`, one column per dimension.
DimensionRanking RankDimensions(const Matrix& per_word_scores,
                                std::span<const std::string> words,
                                const GoldRatings& gold);

// Quartile index 0..3 (Top-25%, Top-50%, Bottom-50%, Bottom-25%) per
// dimension when ranked by `key` descending, ties by lower index. Bands are
// disjoint; when d % 4 != 0 the earlier bands take one extra dimension each.
std::vector<int> QuartileBands(std::span<const double> key);

using ConfusionCounts = std::array<std::array<std::size_t, 4>, 4>;

// Cell (i, j): dimensions in |correlation| quartile i and importance
// quartile j. Requires equal lengths d >= 4.
ConfusionCounts QuartileConfusion(std::span<const double> importance,
                                  std::span<const double> correlations);

struct DimensionAnalysisReport {
  std::vector<std::string> words;
  Matrix per_dim_scores;  // words x d
  DimensionRanking ranking;
  std::optional<Vector> importance;
  std::vector<int> awareness_quartile;
  std::vector<int> importance_quartile;
  std::optional<ConfusionCounts> confusion;
};

// Per-dimension scores for every target, ranked against gold. With a metric,
// also row importance, quartiles and the confusion counts.
DimensionAnalysisReport AnalyzeDimensions(const EmbeddingStore& store,
                                          std::span<const TargetPair> targets,
                                          const GoldRatings& gold,
                                          const MahalanobisMatrix* metric);

// "dim\tcorrelation\timportance\tawareness_quartile\timportance_quartile"
// per line in dimension order. Without a metric, importance and its
// quartile are written as "nan" and "-1".
std::string FormatDimensionTable(const DimensionAnalysisReport& report);
// Four lines of four tab-separated counts.
std::string FormatConfusion(const ConfusionCounts& counts);

}  // namespace scd

#endif  // SCD_DIMENSION_H_
