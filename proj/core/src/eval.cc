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

#include "scd/eval.h"

#include <boost/math/distributions/normal.hpp>
#include <fmt/core.h>

#include <algorithm>
#include <cmath>

#include "scd/encoder.h"
#include "scd/errors.h"

namespace scd {
namespace {

WicEvalResult Summarize(std::vector<std::pair<int, int>> per_instance) {
  WicEvalResult result;
  result.n = per_instance.size();
  std::size_t correct = 0;
  for (const auto& [gold, pred] : per_instance) {
    if (gold == pred) ++correct;
  }
  result.accuracy = static_cast<double>(correct) / static_cast<double>(result.n);
  result.ci95 = BinomialCi(correct, result.n, 0.95);
  result.ci90 = BinomialCi(correct, result.n, 0.90);
  result.per_instance = std::move(per_instance);
  return result;
}

}  // namespace

Interval BinomialCi(std::size_t successes, std::size_t n, double confidence) {
  if (n == 0) throw ValidationError("binomial interval needs n >= 1");
  if (successes > n) {
    throw ValidationError(fmt::format("successes {} exceed trials {}", successes, n));
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw ValidationError(fmt::format("confidence {} outside (0, 1)", confidence));
  }
  const double z = boost::math::quantile(boost::math::normal_distribution<double>(),
                                         0.5 + 0.5 * confidence);
  const double p = static_cast<double>(successes) / static_cast<double>(n);
  const double half = z * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  return {std::max(0.0, p - half), std::min(1.0, p + half)};
}

bool SignificantlyDifferent(const Interval& a, const Interval& b) {
  return a.high < b.low || b.high < a.low;
}

WicEvalResult EvalWic(const MahalanobisMatrix& a, const BoundPair& bounds,
                      const ConstraintSet& test, const EmbeddingStore& store) {
  if (test.empty()) throw ValidationError("WiC evaluation needs a non-empty test set");
  std::vector<std::pair<int, int>> per_instance;
  per_instance.reserve(test.size());
  for (const auto& c : test.items) {
    const PairPrediction pred = ClassifyPair(a, bounds, store.Row(c.row1), store.Row(c.row2));
    per_instance.emplace_back(c.label, pred.label);
  }
  return Summarize(std::move(per_instance));
}

WicEvalResult EvalWicMarginBaseline(const ConstraintSet& test,
                                    const EmbeddingStore& store, double margin) {
  if (test.empty()) throw ValidationError("WiC evaluation needs a non-empty test set");
  std::vector<std::pair<int, int>> per_instance;
  per_instance.reserve(test.size());
  for (const auto& c : test.items) {
    const double delta = CosineDistance(store.Row(c.row1), store.Row(c.row2));
    per_instance.emplace_back(c.label, delta < margin ? 1 : 0);
  }
  return Summarize(std::move(per_instance));
}

ScdEvalResult EvalScd(std::span<const ChangeScore> scores, const GoldRatings& gold) {
  if (scores.size() < 2) throw ValidationError("SCD evaluation needs at least two words");
  ScdEvalResult result;
  std::vector<double> predicted;
  std::vector<double> expected;
  for (const auto& s : scores) {
    const double g = gold.at(s.word);
    result.per_word.push_back({s.word, s.score, g});
    predicted.push_back(s.score);
    expected.push_back(g);
  }
  result.n_targets = result.per_word.size();
  result.spearman_r = Spearman(predicted, expected);
  return result;
}

std::string FormatWicSummary(const WicEvalResult& r) {
  return fmt::format(
      "accuracy={}\nn={}\nci95_low={}\nci95_high={}\nci90_low={}\nci90_high={}\n"
      "interval_method={}\n",
      r.accuracy, r.n, r.ci95.low, r.ci95.high, r.ci90.low, r.ci90.high,
      r.interval_method);
}

std::string FormatWicDetail(const WicEvalResult& r) {
  std::string text;
  for (const auto& [gold, pred] : r.per_instance) text += fmt::format("{}\t{}\n", gold, pred);
  return text;
}

std::string FormatScdSummary(const ScdEvalResult& r) {
  return fmt::format("spearman_r={}\nn_targets={}\n", r.spearman_r, r.n_targets);
}

std::string FormatScdDetail(const ScdEvalResult& r) {
  std::string text;
  for (const auto& w : r.per_word) {
    text += fmt::format("{}\t{}\t{}\n", w.word, w.predicted, w.gold);
  }
  return text;
}

}  // namespace scd
