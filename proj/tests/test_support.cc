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

#include "test_support.h"

#include <fmt/core.h>

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <filesystem>
#include <numeric>

namespace scd::testing {
namespace {

std::vector<std::size_t> ChooseDims(std::size_t dim, std::size_t count,
                                    std::mt19937_64& rng) {
  std::vector<std::size_t> all(dim);
  std::iota(all.begin(), all.end(), 0);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(count);
  std::sort(all.begin(), all.end());
  return all;
}

bool Contains(const std::vector<std::size_t>& v, std::size_t x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

// Balanced pairs: alternate label 1 and 0, rows drawn from `pool`.
ConstraintSet SamplePairs(const EmbeddingStore& store,
                          const std::vector<std::size_t>& pool,
                          const std::vector<int>& group, std::size_t count,
                          std::mt19937_64& rng) {
  ConstraintSet set;
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  while (set.size() < count) {
    const int want = set.size() % 2 == 0 ? 1 : 0;
    const std::size_t i = pool[pick(rng)];
    std::size_t j = pool[pick(rng)];
    int guard = 0;
    while ((j == i || (group[i] == group[j]) != (want == 1)) && guard++ < 1000) {
      j = pool[pick(rng)];
    }
    if (j == i || (group[i] == group[j]) != (want == 1)) continue;
    set.items.push_back(MakeConstraint(store, i, j, want));
  }
  return set;
}

}  // namespace

EmbeddingStore RandomStore(std::size_t rows, std::size_t dim, std::uint64_t seed,
                           double scale) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, scale);
  EmbeddingStore store(dim);
  std::vector<float> row(dim);
  for (std::size_t i = 0; i < rows; ++i) {
    for (auto& v : row) v = static_cast<float>(normal(rng));
    store.Append({fmt::format("r{}", i), "w", "c", fmt::format("s{}", i)},
                 std::span<const float>(row));
  }
  return store;
}

Matrix RandomPdMatrix(std::size_t dim, std::mt19937_64& rng, double ridge) {
  std::normal_distribution<double> normal;
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix b(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) b(i, j) = normal(rng);
  }
  Matrix a = b * b.transpose() + ridge * Matrix::Identity(d, d);
  // Exact symmetry.
  return 0.5 * (a + a.transpose());
}

Vector RandomVector(std::size_t dim, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
  return v;
}

double BruteForceMahalanobis(const Matrix& a, const Vector& x, const Vector& y) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      h += a(i, j) * (x(i) - y(i)) * (x(j) - y(j));
    }
  }
  return h;
}

double BruteForceScore(const Matrix& a, const OccurrenceSet& s1,
                       const OccurrenceSet& s2, const EmbeddingStore& store) {
  long double total = 0.0L;
  for (std::size_t r1 : s1.rows) {
    for (std::size_t r2 : s2.rows) {
      total += BruteForceMahalanobis(a, store.Row(r1), store.Row(r2));
    }
  }
  return static_cast<double>(total / (static_cast<long double>(s1.count()) *
                                      static_cast<long double>(s2.count())));
}

std::vector<double> CountingRanks(std::span<const double> v) {
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::size_t less = 0;
    std::size_t equal = 0;
    for (double u : v) {
      if (u < v[i]) ++less;
      if (u == v[i]) ++equal;
    }
    ranks[i] = 1.0 + static_cast<double>(less) + 0.5 * static_cast<double>(equal - 1);
  }
  return ranks;
}

double BruteForceSpearman(std::span<const double> x, std::span<const double> y) {
  const std::vector<double> rx = CountingRanks(x);
  const std::vector<double> ry = CountingRanks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

PlantedWicProblem MakePlantedWicProblem(const PlantedWicOptions& o) {
  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> normal;
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<std::size_t> pick_class(0, o.classes - 1);

  PlantedWicProblem p;
  p.store = EmbeddingStore(o.dim);
  p.planted_dims = ChooseDims(o.dim, o.planted, rng);

  // Rows of a Sylvester-Hadamard matrix when the sizes allow it, so every
  // pair of classes differs in exactly half the planted coordinates.
  std::vector<Vector> codes(o.classes, Vector(static_cast<Eigen::Index>(o.planted)));
  const bool hadamard = o.planted > 0 && (o.planted & (o.planted - 1)) == 0 &&
                        o.classes < o.planted;
  for (std::size_t c = 0; c < codes.size(); ++c) {
    for (Eigen::Index k = 0; k < codes[c].size(); ++k) {
      bool positive = coin(rng);
      if (hadamard) {
        positive = std::popcount((c + 1) & static_cast<std::size_t>(k)) % 2 == 0;
      }
      codes[c](k) = positive ? o.class_scale : -o.class_scale;
    }
  }

  std::vector<int> klass;
  auto make_pool = [&](std::size_t rows, const char* split) {
    std::vector<std::size_t> pool;
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t c = pick_class(rng);
      Vector x(static_cast<Eigen::Index>(o.dim));
      std::size_t planted_k = 0;
      for (std::size_t k = 0; k < o.dim; ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        if (Contains(p.planted_dims, k)) {
          x(kk) = codes[c](static_cast<Eigen::Index>(planted_k++)) + o.planted_noise * normal(rng);
        } else {
          x(kk) = o.noise * normal(rng);
        }
      }
      const std::size_t row = p.store.size();
      p.store.Append({fmt::format("{}{}", split, r), "target", split,
                      fmt::format("{}-s{}", split, r)},
                     x);
      klass.push_back(static_cast<int>(c));
      pool.push_back(row);
    }
    return pool;
  };

  const auto train_pool = make_pool(std::max<std::size_t>(200, o.train_pairs / 4), "train");
  const auto dev_pool = make_pool(std::max<std::size_t>(100, o.dev_pairs / 4), "dev");
  const auto test_pool = make_pool(std::max<std::size_t>(100, o.test_pairs / 4), "test");
  p.train = SamplePairs(p.store, train_pool, klass, o.train_pairs, rng);
  p.dev = SamplePairs(p.store, dev_pool, klass, o.dev_pairs, rng);
  p.test = SamplePairs(p.store, test_pool, klass, o.test_pairs, rng);
  return p;
}

PlantedDriftProblem MakePlantedDriftProblem(const PlantedDriftOptions& o) {
  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> normal;
  std::bernoulli_distribution coin(0.5);
  std::uniform_real_distribution<double> noise_scale(o.target_noise_low, o.target_noise_high);
  constexpr double kAwareNoise = 0.1;

  PlantedDriftProblem p;
  p.store = EmbeddingStore(o.dim);
  p.aware_dims = ChooseDims(o.dim, o.aware, rng);
  const auto d = static_cast<Eigen::Index>(o.dim);

  struct Lemma {
    Vector sense_a;
    Vector sense_b;
    double noise;
  };
  auto make_lemma = [&](double noise) {
    Lemma l{Vector(d), Vector(d), noise};
    for (Eigen::Index k = 0; k < d; ++k) {
      l.sense_a(k) = normal(rng);
      l.sense_b(k) = l.sense_a(k);
      if (Contains(p.aware_dims, static_cast<std::size_t>(k))) {
        l.sense_b(k) += coin(rng) ? o.sense_shift : -o.sense_shift;
      }
    }
    return l;
  };
  auto occurrence = [&](const Lemma& l, bool sense_b) {
    Vector x = sense_b ? l.sense_b : l.sense_a;
    for (Eigen::Index k = 0; k < d; ++k) {
      const bool aware = Contains(p.aware_dims, static_cast<std::size_t>(k));
      x(k) += (aware ? kAwareNoise : l.noise) * normal(rng);
    }
    return x;
  };

  // Distinct change fractions k / occurrences, assigned to words at random.
  std::vector<std::size_t> changed(o.words);
  for (std::size_t w = 0; w < o.words; ++w) {
    changed[w] = 2 + w * (o.occurrences - 4) / std::max<std::size_t>(1, o.words - 1);
  }
  std::shuffle(changed.begin(), changed.end(), rng);

  for (std::size_t w = 0; w < o.words; ++w) {
    const Lemma lemma = make_lemma(noise_scale(rng));
    const std::string word = fmt::format("t{:02}", w);
    TargetPair target{{word, "C1", {}}, {word, "C2", {}}};
    for (std::size_t i = 0; i < o.occurrences; ++i) {
      target.first.rows.push_back(p.store.size());
      p.store.Append({fmt::format("{}-C1-{}", word, i), word, "C1",
                      fmt::format("s{}", i)},
                     occurrence(lemma, false));
    }
    for (std::size_t i = 0; i < o.occurrences; ++i) {
      target.second.rows.push_back(p.store.size());
      p.store.Append({fmt::format("{}-C2-{}", word, i), word, "C2",
                      fmt::format("s{}", i)},
                     occurrence(lemma, i < changed[w]));
    }
    p.gold.entries[word] =
        static_cast<double>(changed[w]) / static_cast<double>(o.occurrences);
    p.targets.push_back(std::move(target));
  }

  std::vector<int> sense(p.store.size(), -1);
  auto lemma_pairs = [&](std::size_t lemmas, std::size_t pairs, const char* prefix) {
    ConstraintSet set;
    const std::size_t per_lemma = std::max<std::size_t>(2, pairs / lemmas);
    for (std::size_t l = 0; l < lemmas; ++l) {
      const Lemma lemma = make_lemma(o.training_noise);
      std::vector<std::size_t> pool;
      for (std::size_t i = 0; i < 12; ++i) {
        const bool b = i % 2 == 1;
        pool.push_back(p.store.size());
        p.store.Append({fmt::format("{}{}-{}", prefix, l, i), fmt::format("{}{}", prefix, l),
                        "W", fmt::format("s{}", i)},
                       occurrence(lemma, b));
        sense.push_back(b ? 1 : 0);
      }
      ConstraintSet part = SamplePairs(p.store, pool, sense, per_lemma, rng);
      set.items.insert(set.items.end(), part.items.begin(), part.items.end());
    }
    return set;
  };
  p.train = lemma_pairs(o.training_lemmas, o.train_pairs, "L");
  p.dev = lemma_pairs(std::max<std::size_t>(1, o.training_lemmas / 3), o.dev_pairs, "D");
  return p;
}

TempDir::TempDir() {
  std::string tmpl = (std::filesystem::temp_directory_path() / "scdtest-XXXXXX").string();
  if (::mkdtemp(tmpl.data()) == nullptr) std::abort();
  root_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(root_, ec);
}

std::string TempDir::Path(const std::string& name) const {
  return (std::filesystem::path(root_) / name).string();
}

}  // namespace scd::testing
