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

#include "scd/dimension.h"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "binary_io.h"
#include "scd/errors.h"
#include "scd/keyvalue.h"
#include "summation.h"

namespace scd {

double GoldRatings::at(const std::string& word) const {
  auto it = entries.find(word);
  if (it == entries.end()) {
    throw DataError(fmt::format("no gold rating for word '{}'", word));
  }
  return it->second;
}

GoldRatings ReadGoldRatings(const std::string& path) {
  const std::string text = internal::ReadFileBytes(path);
  GoldRatings gold;
  std::string_view rest = text;
  std::size_t line_no = 0;
  while (!rest.empty()) {
    ++line_no;
    const auto eol = rest.find('\n');
    std::string_view line = rest.substr(0, eol);
    rest = eol == std::string_view::npos ? std::string_view{} : rest.substr(eol + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos || line.find('\t', tab + 1) != std::string_view::npos) {
      throw ParseError(fmt::format("{}:{}: expected word<TAB>rating", path, line_no));
    }
    const double rating =
        ParseDouble(line.substr(tab + 1), fmt::format("{}:{}", path, line_no));
    if (!std::isfinite(rating)) {
      throw ParseError(fmt::format("{}:{}: rating is not finite", path, line_no));
    }
    if (!gold.entries.emplace(std::string(line.substr(0, tab)), rating).second) {
      throw DataError(fmt::format("{}:{}: duplicate word '{}'", path, line_no,
                                  line.substr(0, tab)));
    }
  }
  if (gold.entries.size() < 2) {
    throw DataError(fmt::format("{}: need at least two gold ratings", path));
  }
  return gold;
}

std::vector<double> AverageRanks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[idx[j]] == values[idx[i]]) ++j;
    // Positions i..j-1 (0-based) share the mean 1-based rank.
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[idx[k]] = rank;
    i = j;
  }
  return ranks;
}

double Spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw ValidationError(fmt::format("spearman of lists with lengths {} and {}",
                                      x.size(), y.size()));
  }
  if (x.size() < 2) throw ValidationError("spearman needs at least two values");
  for (double v : x) {
    if (!std::isfinite(v)) throw ValidationError("spearman input is not finite");
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw ValidationError("spearman input is not finite");
  }
  const std::vector<double> rx = AverageRanks(x);
  const std::vector<double> ry = AverageRanks(y);
  const double mean = 0.5 * static_cast<double>(x.size() + 1);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw ValidationError("spearman correlation undefined for a constant input");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

Vector DimensionScores(const OccurrenceSet& s1, const OccurrenceSet& s2,
                       const EmbeddingStore& store) {
  for (const OccurrenceSet* s : {&s1, &s2}) {
    if (s->rows.empty()) {
      throw ValidationError(fmt::format(
          "cannot score '{}': no occurrences in corpus '{}'", s->word, s->corpus_id));
    }
    for (std::size_t r : s->rows) {
      if (r >= store.size()) {
        throw DataError(fmt::format("'{}': occurrence row {} outside store", s->word, r));
      }
    }
  }
  const auto d = static_cast<Eigen::Index>(store.dim());
  std::vector<Vector> second;
  second.reserve(s2.rows.size());
  for (std::size_t r : s2.rows) second.push_back(store.Row(r));

  std::vector<internal::CompensatedSum> sums(static_cast<std::size_t>(d));
  for (std::size_t r : s1.rows) {
    const Vector x = store.Row(r);
    for (const Vector& y : second) {
      for (Eigen::Index k = 0; k < d; ++k) {
        sums[static_cast<std::size_t>(k)].Add(std::abs(x(k) - y(k)));
      }
    }
  }
  const double pairs = static_cast<double>(s1.count()) * static_cast<double>(s2.count());
  Vector out(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    out(k) = sums[static_cast<std::size_t>(k)].value() / pairs;
  }
  return out;
}

DimensionRanking RankDimensions(const Matrix& per_word_scores,
                                std::span<const std::string> words,
                                const GoldRatings& gold) {
  if (static_cast<std::size_t>(per_word_scores.rows()) != words.size()) {
    throw ShapeError(fmt::format("{} score rows for {} words", per_word_scores.rows(),
                                 words.size()));
  }
  if (words.size() < 2) throw ValidationError("ranking dimensions needs at least two words");

  std::vector<double> ratings;
  ratings.reserve(words.size());
  for (const auto& w : words) ratings.push_back(gold.at(w));

  const auto d = per_word_scores.cols();
  DimensionRanking out;
  out.correlations = Vector::Zero(d);
  out.undefined.assign(static_cast<std::size_t>(d), false);
  std::vector<double> column(words.size());
  for (Eigen::Index k = 0; k < d; ++k) {
    for (std::size_t i = 0; i < words.size(); ++i) {
      column[i] = per_word_scores(static_cast<Eigen::Index>(i), k);
    }
    const bool constant = std::all_of(column.begin(), column.end(),
                                      [&](double v) { return v == column.front(); });
    if (constant) {
      out.undefined[static_cast<std::size_t>(k)] = true;
      continue;
    }
    out.correlations(k) = Spearman(column, ratings);
  }

  out.order.resize(static_cast<std::size_t>(d));
  std::iota(out.order.begin(), out.order.end(), 0);
  std::stable_sort(out.order.begin(), out.order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(out.correlations(static_cast<Eigen::Index>(a))) >
           std::abs(out.correlations(static_cast<Eigen::Index>(b)));
  });
  return out;
}

std::vector<int> QuartileBands(std::span<const double> key) {
  const std::size_t d = key.size();
  if (d < 4) throw ValidationError(fmt::format("quartiles need d >= 4, got {}", d));
  std::vector<std::size_t> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });

  std::array<std::size_t, 4> size{};
  for (std::size_t b = 0; b < 4; ++b) size[b] = d / 4 + (b < d % 4 ? 1 : 0);
  std::vector<int> band(d);
  std::size_t pos = 0;
  for (int b = 0; b < 4; ++b) {
    for (std::size_t k = 0; k < size[static_cast<std::size_t>(b)]; ++k) {
      band[idx[pos++]] = b;
    }
  }
  return band;
}

ConfusionCounts QuartileConfusion(std::span<const double> importance,
                                  std::span<const double> correlations) {
  if (importance.size() != correlations.size()) {
    throw ValidationError(fmt::format("importance has {} entries, correlations {}",
                                      importance.size(), correlations.size()));
  }
  std::vector<double> awareness(correlations.size());
  std::transform(correlations.begin(), correlations.end(), awareness.begin(),
                 [](double c) { return std::abs(c); });
  const std::vector<int> aware_band = QuartileBands(awareness);
  const std::vector<int> importance_band = QuartileBands(importance);
  ConfusionCounts counts{};
  for (std::size_t k = 0; k < awareness.size(); ++k) {
    ++counts[static_cast<std::size_t>(aware_band[k])]
            [static_cast<std::size_t>(importance_band[k])];
  }
  return counts;
}

DimensionAnalysisReport AnalyzeDimensions(const EmbeddingStore& store,
                                          std::span<const TargetPair> targets,
                                          const GoldRatings& gold,
                                          const MahalanobisMatrix* metric) {
  DimensionAnalysisReport report;
  const auto d = static_cast<Eigen::Index>(store.dim());
  report.per_dim_scores.resize(static_cast<Eigen::Index>(targets.size()), d);
  for (std::size_t t = 0; t < targets.size(); ++t) {
    report.words.push_back(targets[t].first.word);
    report.per_dim_scores.row(static_cast<Eigen::Index>(t)) =
        DimensionScores(targets[t].first, targets[t].second, store).transpose();
  }
  report.ranking = RankDimensions(report.per_dim_scores, report.words, gold);

  std::vector<double> awareness(static_cast<std::size_t>(d));
  for (Eigen::Index k = 0; k < d; ++k) {
    awareness[static_cast<std::size_t>(k)] = std::abs(report.ranking.correlations(k));
  }
  if (d >= 4) report.awareness_quartile = QuartileBands(awareness);

  if (metric != nullptr) {
    if (metric->dim() != store.dim()) {
      throw ShapeError(fmt::format("metric dimension {} != store dimension {}",
                                   metric->dim(), store.dim()));
    }
    report.importance = RowImportance(*metric);
    if (d >= 4) {
      std::vector<double> imp(report.importance->data(),
                              report.importance->data() + d);
      std::vector<double> corr(report.ranking.correlations.data(),
                               report.ranking.correlations.data() + d);
      report.importance_quartile = QuartileBands(imp);
      report.confusion = QuartileConfusion(imp, corr);
    }
  }
  return report;
}

std::string FormatDimensionTable(const DimensionAnalysisReport& report) {
  std::string text;
  const auto d = report.ranking.correlations.size();
  for (Eigen::Index k = 0; k < d; ++k) {
    const auto i = static_cast<std::size_t>(k);
    const int aq = report.awareness_quartile.empty() ? -1 : report.awareness_quartile[i];
    const int iq = report.importance_quartile.empty() ? -1 : report.importance_quartile[i];
    const std::string imp =
        report.importance ? fmt::format("{}", (*report.importance)(k)) : "nan";
    text += fmt::format("{}\t{}\t{}\t{}\t{}\n", k, report.ranking.correlations(k), imp,
                        aq, iq);
  }
  return text;
}

std::string FormatConfusion(const ConfusionCounts& counts) {
  std::string text;
  for (const auto& row : counts) {
    text += fmt::format("{}\t{}\t{}\t{}\n", row[0], row[1], row[2], row[3]);
  }
  return text;
}

}  // namespace scd
