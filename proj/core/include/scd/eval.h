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

#ifndef SCD_EVAL_H_
#define SCD_EVAL_H_

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scd/constraints.h"
#include "scd/dimension.h"
#include "scd/itml.h"
#include "scd/metric.h"
#include "scd/scorer.h"
#include "scd/store.h"

namespace scd {

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

// Wald interval p +/- z sqrt(p (1 - p) / n), clipped to [0, 1], with z the
// two-sided normal quantile for `confidence`.
Interval BinomialCi(std::size_t successes, std::size_t n, double confidence);

// True when the intervals do not overlap.
bool SignificantlyDifferent(const Interval& a, const Interval& b);

struct WicEvalResult {
  double accuracy = 0.0;
  std::size_t n = 0;
  Interval ci95;
  Interval ci90;
  std::string interval_method = "wald";
  // (gold, predicted) per test instance, in input order.
  std::vector<std::pair<int, int>> per_instance;
};

// Predictions from the learned boundaries via ClassifyPair.
WicEvalResult EvalWic(const MahalanobisMatrix& a, const BoundPair& bounds,
                      const ConstraintSet& test, const EmbeddingStore& store);

// Predicts 1 iff cosine distance < margin.
WicEvalResult EvalWicMarginBaseline(const ConstraintSet& test,
                                    const EmbeddingStore& store, double margin);

struct ScdWordResult {
  std::string word;
  double predicted = 0.0;
  double gold = 0.0;
};

struct ScdEvalResult {
  double spearman_r = 0.0;
  std::size_t n_targets = 0;
  std::vector<ScdWordResult> per_word;
};

ScdEvalResult EvalScd(std::span<const ChangeScore> scores, const GoldRatings& gold);

// Summary as "key=value" lines.
std::string FormatWicSummary(const WicEvalResult& result);
// "gold\tpredicted" per instance.
std::string FormatWicDetail(const WicEvalResult& result);
std::string FormatScdSummary(const ScdEvalResult& result);
// "word\tpredicted\tgold" per word.
std::string FormatScdDetail(const ScdEvalResult& result);

}  // namespace scd

#endif  // SCD_EVAL_H_
