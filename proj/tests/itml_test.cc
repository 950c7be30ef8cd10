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

#include "scd/itml.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "scd/errors.h"
#include "test_support.h"

namespace scd {
namespace {

std::vector<double> OneToHundred() {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);
  return v;
}

TEST(NearestRankPercentile, UniformGrid) {
  EXPECT_EQ(NearestRankPercentile(OneToHundred(), 95.0), 95.0);
  EXPECT_EQ(NearestRankPercentile(OneToHundred(), 5.0), 5.0);
  EXPECT_EQ(NearestRankPercentile(OneToHundred(), 100.0), 100.0);
  EXPECT_EQ(NearestRankPercentile({3.0, 1.0, 2.0}, 50.0), 2.0);
  EXPECT_EQ(NearestRankPercentile({4.0}, 1.0), 4.0);
}

TEST(NearestRankPercentile, RejectsBadInput) {
  EXPECT_THROW(NearestRankPercentile({}, 50.0), ValidationError);
  EXPECT_THROW(NearestRankPercentile({1.0}, 0.0), ValidationError);
  EXPECT_THROW(NearestRankPercentile({1.0}, 101.0), ValidationError);
}

TEST(EstimateBounds, PercentilesOfEachList) {
  const std::vector<double> v = OneToHundred();
  const BoundPair b = EstimateBounds(v, v);
  EXPECT_EQ(b.upper, 95.0);
  EXPECT_EQ(b.lower, 5.0);
  EXPECT_FALSE(b.degenerate);
  // u > l here, which is tolerated with a warning.
  EXPECT_FALSE(b.warnings.empty());
}

TEST(EstimateBounds, ConstantListsAreDegenerate) {
  const std::vector<double> v{7, 7, 7};
  const BoundPair b = EstimateBounds(v, v);
  EXPECT_EQ(b.upper, 7.0);
  EXPECT_EQ(b.lower, 7.0);
  EXPECT_TRUE(b.degenerate);
  EXPECT_FALSE(b.warnings.empty());
}

TEST(EstimateBounds, EmptyOrNegativeIsError) {
  const std::vector<double> v{1, 2};
  EXPECT_THROW(EstimateBounds({}, v), ValidationError);
  EXPECT_THROW(EstimateBounds(v, {}), ValidationError);
  EXPECT_THROW(EstimateBounds(std::vector<double>{-1.0}, v), ValidationError);
}

TEST(EstimateBounds, PercentileKnob) {
  const std::vector<double> v = OneToHundred();
  const BoundPair b = EstimateBounds(v, v, {5.0, 95.0});
  EXPECT_EQ(b.upper, 5.0);
  EXPECT_EQ(b.lower, 95.0);
}

// Similar pairs differ only in dimension 1, dissimilar only in dimension 0.
struct TwoDimProblem {
  EmbeddingStore store{2};
  ConstraintSet set;
};

TwoDimProblem MakeTwoDim(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> base(-1.0, 1.0);
  std::uniform_real_distribution<double> gap(0.5, 2.0);
  TwoDimProblem p;
  for (int i = 0; i < 100; ++i) {
    const bool similar = i < 50;
    Vector x(2);
    x << base(rng), base(rng);
    Vector y = x;
    y(similar ? 1 : 0) += gap(rng);
    const std::size_t r = p.store.size();
    p.store.Append({"a" + std::to_string(i), "w", "c", "s"}, x);
    p.store.Append({"b" + std::to_string(i), "w", "c", "s"}, y);
    p.set.items.push_back(MakeConstraint(p.store, r, r + 1, similar ? 1 : 0));
  }
  return p;
}

double Mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

TEST(ItmlFit, EmptyConstraintsReturnA0Exactly) {
  const EmbeddingStore store = testing::RandomStore(4, 3, 1);
  std::mt19937_64 rng(2);
  const MahalanobisMatrix a0 = MahalanobisMatrix::Full(testing::RandomPdMatrix(3, rng));
  const ItmlState state = ItmlFit(store, ConstraintSet{}, BoundPair{1.0, 2.0, false, {}}, ItmlConfig{}, a0);
  EXPECT_EQ(state.a.ToDense(), a0.ToDense());
  EXPECT_EQ(state.sweep_count, 0);
  EXPECT_EQ(state.updates_applied, 0u);
  EXPECT_TRUE(state.converged);
}

TEST(ItmlFit, TwoDimSeparableProblem) {
  const TwoDimProblem p = MakeTwoDim(3);
  const MahalanobisMatrix identity = MahalanobisMatrix::Identity(2);
  const BoundPair bounds = EstimateBounds(p.store, p.set, identity);
  ItmlConfig config;
  config.gamma = 1.0;
  const ItmlState state = ItmlFit(p.store, p.set, bounds, config);
  ASSERT_TRUE(state.converged);
  EXPECT_GT(state.a(0, 0), state.a(1, 1));

  // Brute-force constraint check over the final matrix.
  const Matrix dense = state.a.ToDense();
  std::size_t satisfied = 0;
  for (const Constraint& c : p.set.items) {
    const double h =
        testing::BruteForceMahalanobis(dense, p.store.Row(c.row1), p.store.Row(c.row2));
    satisfied += c.similar() ? h <= bounds.upper + 1e-6 : h >= bounds.lower - 1e-6;
  }
  EXPECT_GE(satisfied, 95u);

  const ConstraintDistances before = ComputeConstraintDistances(p.store, p.set, identity);
  const ConstraintDistances after = ComputeConstraintDistances(p.store, p.set, state.a);
  EXPECT_LT(Mean(after.similar), Mean(before.similar));
  EXPECT_GT(Mean(after.dissimilar), Mean(before.dissimilar));
}

TEST(ItmlFit, SingleSimilarConstraintMeetsBound) {
  EmbeddingStore store(2);
  Vector x(2);
  x << 0.0, 0.0;
  Vector y(2);
  y << 2.0, 0.0;
  store.Append({"x", "w", "c", "s"}, x);
  store.Append({"y", "w", "c", "s"}, y);
  ConstraintSet set;
  set.items.push_back(MakeConstraint(store, 0, 1, 1));
  const BoundPair bounds{1.0, 6.0, false, {}};
  // Slack lets the target drift from u; a large gamma keeps it tight.
  for (double gamma : {10.0, 100.0, 1e5}) {
    ItmlConfig config;
    config.gamma = gamma;
    config.convergence_tol = 1e-12;
    const ItmlState state = ItmlFit(store, set, bounds, config);
    EXPECT_TRUE(state.converged);
    EXPECT_LE(MahalanobisDistance(state.a, x, y), bounds.upper * (1 + 1e-6)) << gamma;
  }
  // The exact projection approaches u from above as gamma grows.
  double previous = MahalanobisDistance(MahalanobisMatrix::Identity(2), x, y);
  for (double gamma : {1.0, 100.0, 1e4, 1e7}) {
    ItmlConfig exact;
    exact.slack_rule = SlackRule::kExactProjection;
    exact.gamma = gamma;
    exact.convergence_tol = 1e-12;
    const double h = MahalanobisDistance(ItmlFit(store, set, bounds, exact).a, x, y);
    EXPECT_LT(h, previous);
    EXPECT_GE(h, bounds.upper * (1 - 1e-12));
    previous = h;
  }
  EXPECT_LE(previous, bounds.upper * (1 + 1e-6));
}

TEST(ItmlFit, DualVariablesStayNonNegative) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const std::size_t d = 1 + rng() % 8;
    const EmbeddingStore store = testing::RandomStore(40, d, rng());
    ConstraintSet set;
    for (std::size_t i = 0; i + 1 < store.size(); i += 2) {
      set.items.push_back(MakeConstraint(store, i, i + 1, static_cast<int>(i / 2 % 2)));
    }
    const BoundPair bounds = EstimateBounds(store, set, MahalanobisMatrix::Identity(d));
    ItmlConfig config;
    config.gamma = DefaultGammaGrid()[rng() % 11];
    config.max_sweeps = 50;
    config.verify_pd_each_update = true;
    const ItmlState state = ItmlFit(store, set, bounds, config);
    for (double lambda : state.lambdas) EXPECT_GE(lambda, 0.0);
    for (double xi : state.xis) EXPECT_GT(xi, 0.0);
    EXPECT_TRUE(CheckPositiveDefinite(state.a).positive_definite);
  }
}

TEST(ItmlFit, DeterministicWithShuffleSeed) {
  const testing::PlantedWicProblem p = testing::MakePlantedWicProblem(
      {.dim = 16, .planted = 4, .train_pairs = 300, .dev_pairs = 50, .test_pairs = 50});
  const BoundPair bounds = EstimateBounds(p.store, p.train, MahalanobisMatrix::Identity(16));
  ItmlConfig config;
  config.shuffle = true;
  config.seed = 42;
  const ItmlState a = ItmlFit(p.store, p.train, bounds, config);
  const ItmlState b = ItmlFit(p.store, p.train, bounds, config);
  EXPECT_EQ(a.a.ToDense(), b.a.ToDense());
  EXPECT_EQ(a.lambdas, b.lambdas);
  config.seed = 43;
  const ItmlState c = ItmlFit(p.store, p.train, bounds, config);
  EXPECT_NE(a.a.ToDense(), c.a.ToDense());
}

TEST(ItmlFit, ZeroDistanceDissimilarPairIsSkippedWithWarning) {
  EmbeddingStore store(2);
  Vector x(2);
  x << 1.0, 1.0;
  Vector far(2);
  far << 3.0, 1.0;
  store.Append({"a", "w", "c", "s"}, x);
  store.Append({"b", "w", "c", "s"}, x);
  store.Append({"c", "w", "c", "s"}, far);
  ConstraintSet set;
  set.items.push_back(MakeConstraint(store, 0, 1, 0));
  set.items.push_back(MakeConstraint(store, 0, 2, 1));
  const ItmlState state = ItmlFit(store, set, BoundPair{1.0, 2.0, false, {}}, ItmlConfig{});
  EXPECT_GE(state.skipped_constraints, 1u);
  EXPECT_FALSE(state.warnings.empty());
  EXPECT_TRUE(CheckPositiveDefinite(state.a).positive_definite);
}

TEST(ItmlFit, RejectsBadInputs) {
  const EmbeddingStore store = testing::RandomStore(4, 3, 1);
  ConstraintSet set;
  set.items.push_back(MakeConstraint(store, 0, 1, 1));
  ItmlConfig bad;
  bad.gamma = 0.0;
  EXPECT_THROW(ItmlFit(store, set, BoundPair{1.0, 2.0, false, {}}, bad), ValidationError);
  bad = ItmlConfig{};
  bad.max_sweeps = 0;
  EXPECT_THROW(ItmlFit(store, set, BoundPair{1.0, 2.0, false, {}}, bad), ValidationError);
  bad = ItmlConfig{};
  bad.convergence_tol = 0.0;
  EXPECT_THROW(ItmlFit(store, set, BoundPair{1.0, 2.0, false, {}}, bad), ValidationError);
  EXPECT_THROW(ItmlFit(store, set, BoundPair{0.0, 2.0, false, {}}, ItmlConfig{}), ValidationError);
  EXPECT_THROW(ItmlFit(store, set, BoundPair{1.0, 2.0, false, {}}, ItmlConfig{},
                       MahalanobisMatrix::Identity(4)),
               ShapeError);
}

TEST(ExtractDiagonal, Examples) {
  Matrix m(2, 2);
  m << 2, 1, 1, 3;
  const MahalanobisMatrix d = ExtractDiagonal(MahalanobisMatrix::Full(m));
  EXPECT_TRUE(d.is_diagonal());
  EXPECT_EQ(d.diagonal()(0), 2.0);
  EXPECT_EQ(d.diagonal()(1), 3.0);
  EXPECT_EQ(ExtractDiagonal(MahalanobisMatrix::Identity(4)).diagonal(), Vector::Ones(4));
}

TEST(ExtractDiagonal, PositiveAndMatchesWeightedSquares) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const std::size_t d = 1 + rng() % 20;
    const MahalanobisMatrix diag =
        ExtractDiagonal(MahalanobisMatrix::Full(testing::RandomPdMatrix(d, rng)));
    EXPECT_TRUE((diag.diagonal().array() > 0.0).all());
    const Vector x = testing::RandomVector(d, rng);
    const Vector y = testing::RandomVector(d, rng);
    double want = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      want += diag.diagonal()(k) * (x(k) - y(k)) * (x(k) - y(k));
    }
    EXPECT_NEAR(MahalanobisDistance(diag, x, y), want, 1e-9 * std::max(1.0, want));
  }
}

TEST(ClassifyPair, MidpointRule) {
  const BoundPair bounds{1.0, 3.0, false, {}};
  const MahalanobisMatrix a = MahalanobisMatrix::Identity(1);
  const Vector zero = Vector::Zero(1);
  auto at = [](double h) { return Vector::Constant(1, std::sqrt(h)); };
  EXPECT_EQ(ClassifyPair(a, bounds, at(0.5), zero).label, 1);
  EXPECT_EQ(ClassifyPair(a, bounds, at(2.5), zero).label, 0);
  // h = 1 + 1 = 2 exactly.
  const PairPrediction boundary =
      ClassifyPair(MahalanobisMatrix::Identity(2), bounds, Vector::Ones(2), Vector::Zero(2));
  EXPECT_EQ(boundary.label, 1);
  EXPECT_EQ(boundary.threshold, 2.0);
}

TEST(DefaultGammaGrid, ElevenLogSpacedValues) {
  const std::vector<double> grid = DefaultGammaGrid();
  ASSERT_EQ(grid.size(), 11u);
  EXPECT_EQ(grid.front(), 1e-5);
  EXPECT_EQ(grid.back(), 1e5);
  for (std::size_t i = 1; i < grid.size(); ++i) EXPECT_NEAR(grid[i] / grid[i - 1], 10.0, 1e-9);
}

class SlackSearchTest : public ::testing::Test {
 protected:
  void SetUp() override {
    testing::PlantedWicOptions options;
    options.dim = 16;
    options.planted = 4;
    options.noise = 0.2;
    options.train_pairs = 400;
    options.dev_pairs = 200;
    options.test_pairs = 200;
    problem_ = testing::MakePlantedWicProblem(options);
    bounds_ = EstimateBounds(problem_.store, problem_.train, MahalanobisMatrix::Identity(16));
  }
  testing::PlantedWicProblem problem_;
  BoundPair bounds_;
};

TEST_F(SlackSearchTest, DefaultGridMatchesExhaustiveOracle) {
  const std::vector<double> grid = DefaultGammaGrid();
  const SlackSearchResult result =
      SlackSearch(problem_.train, problem_.dev, problem_.store, grid, bounds_, ItmlConfig{},
                  MahalanobisMatrix::Identity(16), 1);
  ASSERT_EQ(result.candidates.size(), 11u);
  double best = -1.0;
  double best_gamma = 0.0;
  for (double gamma : grid) {
    ItmlConfig config;
    config.gamma = gamma;
    const ItmlState state = ItmlFit(problem_.store, problem_.train, bounds_, config);
    const double acc = PairAccuracy(state.a, bounds_, problem_.dev, problem_.store);
    if (acc > best) {
      best = acc;
      best_gamma = gamma;
    }
  }
  EXPECT_EQ(result.best_gamma, best_gamma);
  EXPECT_GE(best, 0.95);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_EQ(result.candidates[i].gamma, grid[i]);
    EXPECT_FALSE(result.candidates[i].failed);
  }
}

TEST_F(SlackSearchTest, SingleValueWinsAndWorkersAgree) {
  const std::vector<double> one{1.0};
  const SlackSearchResult r = SlackSearch(problem_.train, problem_.dev, problem_.store, one,
                                          bounds_, ItmlConfig{}, MahalanobisMatrix::Identity(16));
  EXPECT_EQ(r.best_gamma, 1.0);
  const std::vector<double> grid = DefaultGammaGrid();
  const SlackSearchResult serial =
      SlackSearch(problem_.train, problem_.dev, problem_.store, grid, bounds_, ItmlConfig{},
                  MahalanobisMatrix::Identity(16), 1);
  const SlackSearchResult parallel =
      SlackSearch(problem_.train, problem_.dev, problem_.store, grid, bounds_, ItmlConfig{},
                  MahalanobisMatrix::Identity(16), 4);
  EXPECT_EQ(serial.best_gamma, parallel.best_gamma);
  EXPECT_EQ(serial.best_state.a.ToDense(), parallel.best_state.a.ToDense());
}

TEST_F(SlackSearchTest, FailuresAreRecordedNotFatal) {
  const std::vector<double> grid{-1.0, 1.0};
  const SlackSearchResult r = SlackSearch(problem_.train, problem_.dev, problem_.store, grid,
                                          bounds_, ItmlConfig{}, MahalanobisMatrix::Identity(16));
  EXPECT_TRUE(r.candidates[0].failed);
  EXPECT_FALSE(r.candidates[0].error.empty());
  EXPECT_EQ(r.best_gamma, 1.0);
  const std::vector<double> all_bad{-1.0, 0.0};
  EXPECT_THROW(SlackSearch(problem_.train, problem_.dev, problem_.store, all_bad, bounds_,
                           ItmlConfig{}, MahalanobisMatrix::Identity(16)),
               ValidationError);
}

TEST_F(SlackSearchTest, RequiresDevSetAndGrid) {
  EXPECT_THROW(SlackSearch(problem_.train, ConstraintSet{}, problem_.store, DefaultGammaGrid(),
                           bounds_, ItmlConfig{}, MahalanobisMatrix::Identity(16)),
               ValidationError);
  EXPECT_THROW(SlackSearch(problem_.train, problem_.dev, problem_.store, {}, bounds_,
                           ItmlConfig{}, MahalanobisMatrix::Identity(16)),
               ValidationError);
}

}  // namespace
}  // namespace scd
