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

#ifndef SCD_SCORER_H_
#define SCD_SCORER_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scd/metric.h"
#include "scd/store.h"

namespace scd {

// Occurrences of one target word in one corpus, as store rows.
struct OccurrenceSet {
  std::string word;
  std::string corpus_id;
  std::vector<std::size_t> rows;

  std::size_t count() const { return rows.size(); }
};

// Collects rows whose manifest matches (word, corpus_id), in store order.
OccurrenceSet SelectOccurrences(const EmbeddingStore& store,
                                const std::string& word,
                                const std::string& corpus_id);

enum class ScoreMode { kFull, kDiagonal, kBaselineCosine };

const char* ScoreModeName(ScoreMode mode);
ScoreMode ParseScoreMode(std::string_view name);

struct ChangeScore {
  std::string word;
  double score = 0.0;
  std::uint64_t pair_count = 0;
  ScoreMode mode = ScoreMode::kFull;
};

struct ScoreOptions {
  // Pairs are summed in blocks of this many first-set rows; the block
  // partials are combined in block order, so results do not depend on the
  // number of workers.
  std::size_t block_rows = 32;
  // 0 averages every pair. Otherwise targets with more pairs are scored on
  // a seeded uniform sample of this many distinct pairs.
  std::uint64_t max_pairs = 0;
  std::uint64_t seed = 0;
};

// Mean of h(x, y; A) over all x in s1 and y in s2.
ChangeScore ScoreWord(const MahalanobisMatrix& a, const OccurrenceSet& s1,
                      const OccurrenceSet& s2, const EmbeddingStore& store,
                      const ScoreOptions& options = {});

struct TargetPair {
  OccurrenceSet first;
  OccurrenceSet second;
};

struct BatchEntry {
  std::string word;
  std::optional<ChangeScore> score;
  std::string error;
};

// Scores every target, one entry per target in input order. Per-target
// failures are recorded in the entry and do not stop the batch.
std::vector<BatchEntry> ScoreBatch(const MahalanobisMatrix& a,
                                   std::span<const TargetPair> targets,
                                   const EmbeddingStore& store,
                                   std::size_t workers,
                                   const ScoreOptions& options = {});

using PairKernel = std::function<double(const Eigen::Ref<const Vector>&,
                                        const Eigen::Ref<const Vector>&)>;

// Mean of kernel(x, y) over all cross pairs, compensated summation in
// (i, j) order. Used for the cosine baseline and as a reference path.
double AveragePairwise(const OccurrenceSet& s1, const OccurrenceSet& s2,
                       const EmbeddingStore& store, const PairKernel& kernel);

// Average pairwise cosine distance (APD).
ChangeScore ApdCosineBaseline(const OccurrenceSet& s1, const OccurrenceSet& s2,
                              const EmbeddingStore& store);

// One "word\tcorpus_id_1\tcorpus_id_2" per line.
struct TargetSpec {
  std::string word;
  std::string corpus1;
  std::string corpus2;
};

std::vector<TargetSpec> ReadTargetSpecs(const std::string& path);
std::vector<TargetPair> BuildTargets(const EmbeddingStore& store,
                                     std::span<const TargetSpec> specs);

// "word\tscore\tpair_count\tmode" lines sorted by descending score (ties by
// word).
void WriteScores(std::vector<ChangeScore> scores, const std::string& path);
std::vector<ChangeScore> ReadScores(const std::string& path);

}  // namespace scd

#endif  // SCD_SCORER_H_
