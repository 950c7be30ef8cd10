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

#include "scd/scorer.h"

#include <fmt/core.h>

#include <algorithm>
#include <random>
#include <unordered_set>

#include "binary_io.h"
#include "scd/encoder.h"
#include "scd/errors.h"
#include "scd/keyvalue.h"
#include "scd/parallel.h"
#include "summation.h"

namespace scd {
namespace {

using RowBlock = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void CheckSets(const OccurrenceSet& s1, const OccurrenceSet& s2,
               const EmbeddingStore& store) {
  for (const OccurrenceSet* s : {&s1, &s2}) {
    if (s->rows.empty()) {
      throw ValidationError(fmt::format(
          "cannot score '{}': no occurrences in corpus '{}'", s->word, s->corpus_id));
    }
    for (std::size_t r : s->rows) {
      if (r >= store.size()) {
        throw DataError(fmt::format("'{}': occurrence row {} outside store of {} rows",
                                    s->word, r, store.size()));
      }
    }
  }
}

// Rows of the occurrence set mapped through x -> L^T x so that
// h(x, y; A) = ||L^T x - L^T y||^2.
RowBlock Transform(const OccurrenceSet& s, const EmbeddingStore& store,
                   const MahalanobisMatrix& a, const Matrix& factor) {
  const auto d = static_cast<Eigen::Index>(store.dim());
  RowBlock raw(static_cast<Eigen::Index>(s.rows.size()), d);
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    raw.row(static_cast<Eigen::Index>(i)) = store.Row(s.rows[i]).transpose();
  }
  if (a.is_diagonal()) {
    return raw * a.diagonal().cwiseSqrt().asDiagonal();
  }
  return raw * factor;
}

// FNV-1a; std::hash is not stable across standard libraries.
std::uint64_t StableHash(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

struct PreparedTarget {
  RowBlock first;
  RowBlock second;
  std::size_t num_blocks = 0;
  std::vector<std::uint64_t> sampled;  // flattened pair indices, sorted
};

double BlockSum(const PreparedTarget& t, std::size_t block, std::size_t block_rows) {
  internal::CompensatedSum sum;
  const auto n1 = static_cast<std::size_t>(t.first.rows());
  const auto n2 = static_cast<std::size_t>(t.second.rows());
  if (!t.sampled.empty()) {
    const std::size_t begin = block * block_rows;
    const std::size_t end = std::min(t.sampled.size(), begin + block_rows);
    for (std::size_t k = begin; k < end; ++k) {
      const auto i = static_cast<Eigen::Index>(t.sampled[k] / n2);
      const auto j = static_cast<Eigen::Index>(t.sampled[k] % n2);
      sum.Add((t.first.row(i) - t.second.row(j)).squaredNorm());
    }
    return sum.value();
  }
  const std::size_t begin = block * block_rows;
  const std::size_t end = std::min(n1, begin + block_rows);
  for (std::size_t i = begin; i < end; ++i) {
    const auto x = t.first.row(static_cast<Eigen::Index>(i));
    for (std::size_t j = 0; j < n2; ++j) {
      sum.Add((x - t.second.row(static_cast<Eigen::Index>(j))).squaredNorm());
    }
  }
  return sum.value();
}

PreparedTarget Prepare(const MahalanobisMatrix& a, const Matrix& factor,
                       const TargetPair& target, const EmbeddingStore& store,
                       const ScoreOptions& options) {
  CheckSets(target.first, target.second, store);
  if (store.dim() != a.dim()) {
    throw ShapeError(fmt::format("'{}': store dimension {} != metric dimension {}",
                                 target.first.word, store.dim(), a.dim()));
  }
  PreparedTarget t;
  t.first = Transform(target.first, store, a, factor);
  t.second = Transform(target.second, store, a, factor);

  const std::uint64_t n1 = target.first.count();
  const std::uint64_t n2 = target.second.count();
  const std::uint64_t total = n1 * n2;
  if (options.max_pairs > 0 && total > options.max_pairs) {
    // Floyd's algorithm: max_pairs distinct indices out of [0, total).
    std::mt19937_64 rng(options.seed ^ StableHash(target.first.word));
    std::unordered_set<std::uint64_t> chosen;
    for (std::uint64_t j = total - options.max_pairs; j < total; ++j) {
      const std::uint64_t r = std::uniform_int_distribution<std::uint64_t>(0, j)(rng);
      if (!chosen.insert(r).second) chosen.insert(j);
    }
    t.sampled.assign(chosen.begin(), chosen.end());
    std::sort(t.sampled.begin(), t.sampled.end());
    t.num_blocks = (t.sampled.size() + options.block_rows - 1) / options.block_rows;
  } else {
    t.num_blocks = (n1 + options.block_rows - 1) / options.block_rows;
  }
  return t;
}

Matrix FactorFor(const MahalanobisMatrix& a) {
  if (a.is_diagonal()) {
    if (!(a.diagonal().array() >= 0.0).all()) {
      throw NumericError("diagonal metric has negative entries");
    }
    return Matrix();
  }
  return CholeskyLower(a);
}

void CheckOptions(const ScoreOptions& options) {
  if (options.block_rows == 0) throw ValidationError("block_rows must be positive");
}

}  // namespace

OccurrenceSet SelectOccurrences(const EmbeddingStore& store,
                                const std::string& word,
                                const std::string& corpus_id) {
  return {word, corpus_id, store.RowsFor(word, corpus_id)};
}

const char* ScoreModeName(ScoreMode mode) {
  switch (mode) {
    case ScoreMode::kFull: return "full";
    case ScoreMode::kDiagonal: return "diagonal";
    case ScoreMode::kBaselineCosine: return "baseline-cosine";
  }
  return "unknown";
}

ScoreMode ParseScoreMode(std::string_view name) {
  if (name == "full") return ScoreMode::kFull;
  if (name == "diagonal") return ScoreMode::kDiagonal;
  if (name == "baseline-cosine") return ScoreMode::kBaselineCosine;
  throw ParseError(fmt::format("unknown score mode '{}'", name));
}

namespace {

std::vector<BatchEntry> ScoreImpl(const MahalanobisMatrix& a,
                                  std::span<const TargetPair> targets,
                                  const EmbeddingStore& store,
                                  std::size_t workers, const ScoreOptions& options,
                                  std::vector<std::exception_ptr>& errors) {
  CheckOptions(options);
  std::vector<BatchEntry> entries(targets.size());
  errors.assign(targets.size(), nullptr);
  if (targets.empty()) return entries;
  const Matrix factor = FactorFor(a);
  const ScoreMode mode = a.is_diagonal() ? ScoreMode::kDiagonal : ScoreMode::kFull;

  std::vector<std::optional<PreparedTarget>> prepared(targets.size());
  ParallelFor(targets.size(), workers, [&](std::size_t t) {
    entries[t].word = targets[t].first.word;
    try {
      prepared[t] = Prepare(a, factor, targets[t], store, options);
    } catch (const std::exception& e) {
      entries[t].error = e.what();
      errors[t] = std::current_exception();
    }
  });

  struct Task {
    std::size_t target;
    std::size_t block;
  };
  std::vector<Task> tasks;
  std::vector<std::size_t> first_task(targets.size(), 0);
  for (std::size_t t = 0; t < targets.size(); ++t) {
    first_task[t] = tasks.size();
    if (!prepared[t]) continue;
    for (std::size_t b = 0; b < prepared[t]->num_blocks; ++b) tasks.push_back({t, b});
  }
  std::vector<double> partials(tasks.size(), 0.0);
  ParallelFor(tasks.size(), workers, [&](std::size_t k) {
    partials[k] = BlockSum(*prepared[tasks[k].target], tasks[k].block, options.block_rows);
  });

  for (std::size_t t = 0; t < targets.size(); ++t) {
    if (!prepared[t]) continue;
    internal::CompensatedSum total;
    for (std::size_t b = 0; b < prepared[t]->num_blocks; ++b) {
      total.Add(partials[first_task[t] + b]);
    }
    const std::uint64_t pairs =
        prepared[t]->sampled.empty()
            ? static_cast<std::uint64_t>(targets[t].first.count()) * targets[t].second.count()
            : prepared[t]->sampled.size();
    entries[t].score = ChangeScore{targets[t].first.word,
                                   std::max(0.0, total.value() / static_cast<double>(pairs)),
                                   pairs, mode};
    prepared[t].reset();
  }
  return entries;
}

}  // namespace

ChangeScore ScoreWord(const MahalanobisMatrix& a, const OccurrenceSet& s1,
                      const OccurrenceSet& s2, const EmbeddingStore& store,
                      const ScoreOptions& options) {
  const TargetPair target{s1, s2};
  std::vector<std::exception_ptr> errors;
  auto entries = ScoreImpl(a, std::span<const TargetPair>(&target, 1), store, 1,
                           options, errors);
  if (errors.front()) std::rethrow_exception(errors.front());
  return *entries.front().score;
}

std::vector<BatchEntry> ScoreBatch(const MahalanobisMatrix& a,
                                   std::span<const TargetPair> targets,
                                   const EmbeddingStore& store,
                                   std::size_t workers,
                                   const ScoreOptions& options) {
  std::vector<std::exception_ptr> errors;
  return ScoreImpl(a, targets, store, workers, options, errors);
}

double AveragePairwise(const OccurrenceSet& s1, const OccurrenceSet& s2,
                       const EmbeddingStore& store, const PairKernel& kernel) {
  CheckSets(s1, s2, store);
  std::vector<Vector> second;
  second.reserve(s2.rows.size());
  for (std::size_t r : s2.rows) second.push_back(store.Row(r));
  internal::CompensatedSum sum;
  for (std::size_t r : s1.rows) {
    const Vector x = store.Row(r);
    for (const Vector& y : second) sum.Add(kernel(x, y));
  }
  return sum.value() / (static_cast<double>(s1.count()) * static_cast<double>(s2.count()));
}

ChangeScore ApdCosineBaseline(const OccurrenceSet& s1, const OccurrenceSet& s2,
                              const EmbeddingStore& store) {
  CheckSets(s1, s2, store);
  for (const OccurrenceSet* s : {&s1, &s2}) {
    for (std::size_t r : s->rows) {
      if (!(store.Row(r).norm() > kMinNorm)) {
        throw NumericError(fmt::format("'{}': occurrence '{}' has zero norm",
                                       s->word, store.entry(r).row_id));
      }
    }
  }
  const double score = AveragePairwise(
      s1, s2, store,
      [](const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) {
        return CosineDistance(x, y);
      });
  return {s1.word, score,
          static_cast<std::uint64_t>(s1.count()) * s2.count(),
          ScoreMode::kBaselineCosine};
}

std::vector<TargetSpec> ReadTargetSpecs(const std::string& path) {
  const std::string text = internal::ReadFileBytes(path);
  std::vector<TargetSpec> specs;
  std::string_view rest = text;
  std::size_t line_no = 0;
  while (!rest.empty()) {
    ++line_no;
    const auto eol = rest.find('\n');
    std::string_view line = rest.substr(0, eol);
    rest = eol == std::string_view::npos ? std::string_view{} : rest.substr(eol + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos || line.find('\t', t2 + 1) != std::string_view::npos) {
      throw ParseError(fmt::format("{}:{}: expected word<TAB>corpus1<TAB>corpus2",
                                   path, line_no));
    }
    specs.push_back({std::string(line.substr(0, t1)),
                     std::string(line.substr(t1 + 1, t2 - t1 - 1)),
                     std::string(line.substr(t2 + 1))});
  }
  return specs;
}

std::vector<TargetPair> BuildTargets(const EmbeddingStore& store,
                                     std::span<const TargetSpec> specs) {
  std::vector<TargetPair> targets;
  targets.reserve(specs.size());
  for (const auto& s : specs) {
    targets.push_back({SelectOccurrences(store, s.word, s.corpus1),
                       SelectOccurrences(store, s.word, s.corpus2)});
  }
  return targets;
}

void WriteScores(std::vector<ChangeScore> scores, const std::string& path) {
  std::stable_sort(scores.begin(), scores.end(),
                   [](const ChangeScore& a, const ChangeScore& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.word < b.word;
                   });
  std::string text;
  for (const auto& s : scores) {
    text += fmt::format("{}\t{}\t{}\t{}\n", s.word, s.score, s.pair_count,
                        ScoreModeName(s.mode));
  }
  internal::WriteFileAtomic(path, text);
}

std::vector<ChangeScore> ReadScores(const std::string& path) {
  const std::string text = internal::ReadFileBytes(path);
  std::vector<ChangeScore> scores;
  std::string_view rest = text;
  std::size_t line_no = 0;
  while (!rest.empty()) {
    ++line_no;
    const auto eol = rest.find('\n');
    std::string_view line = rest.substr(0, eol);
    rest = eol == std::string_view::npos ? std::string_view{} : rest.substr(eol + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      f.push_back(line.substr(start, tab - start));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    if (f.size() != 4) {
      throw ParseError(fmt::format("{}:{}: expected 4 tab-separated fields", path, line_no));
    }
    ChangeScore s;
    s.word = std::string(f[0]);
    const std::string where = fmt::format("{}:{}", path, line_no);
    s.score = ParseDouble(f[1], where);
    const long long pairs = ParseInt(f[2], where);
    if (pairs < 0) throw ParseError(fmt::format("{}: negative pair count", where));
    s.pair_count = static_cast<std::uint64_t>(pairs);
    s.mode = ParseScoreMode(f[3]);
    scores.push_back(std::move(s));
  }
  return scores;
}

}  // namespace scd
