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

#ifndef SCD_ITML_H_
#define SCD_ITML_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "scd/constraints.h"
#include "scd/metric.h"
#include "scd/store.h"

namespace scd {

// Distance thresholds: similar pairs should satisfy h <= upper, dissimilar
// pairs h >= lower.
struct BoundPair {
  double upper = 1.0;
  double lower = 1.0;
  // Set when both thresholds coincide, e.g. from constant distance lists.
  bool degenerate = false;
  std::vector<std::string> warnings;

  double midpoint() const { return 0.5 * (upper + lower); }
};

// Percentiles (0, 100] used to anchor the bounds. The defaults put the upper
// bound at the distance covering 95% of similar pairs and the lower bound at
// the 5th percentile of dissimilar pairs.
struct BoundPercentiles {
  double similar = 95.0;
  double dissimilar = 5.0;
};

// Nearest-rank percentile: the value at rank ceil(p/100 * n) of the sorted
// list (rank clamped to [1, n]).
double NearestRankPercentile(std::vector<double> values, double percentile);

BoundPair EstimateBounds(std::span<const double> similar_distances,
                         std::span<const double> dissimilar_distances,
                         const BoundPercentiles& percentiles = {});

struct ConstraintDistances {
  std::vector<double> similar;
  std::vector<double> dissimilar;
};

ConstraintDistances ComputeConstraintDistances(const EmbeddingStore& store,
                                               const ConstraintSet& constraints,
                                               const MahalanobisMatrix& a);

// Bounds from the distances of the constraint pairs under metric a.
BoundPair EstimateBounds(const EmbeddingStore& store,
                         const ConstraintSet& constraints,
                         const MahalanobisMatrix& a,
                         const BoundPercentiles& percentiles = {});

// How the dual step and slack target are computed for each constraint.
//
// kAlgorithm:        alpha = min(lambda, delta/2 (1/p - gamma/xi)),
//                    xi <- gamma xi / (gamma + delta alpha xi).
// kExactProjection:  alpha = min(lambda, delta gamma/(gamma+1) (1/p - 1/xi)),
//                    xi <- 1 / (1/xi + delta alpha / gamma).
// Both agree at gamma = 1.
enum class SlackRule { kAlgorithm, kExactProjection };

struct ItmlConfig {
  double gamma = 1.0;
  int max_sweeps = 1000;
  // Converged once max |lambda change| over a sweep is at most this.
  double convergence_tol = 1e-3;
  std::uint64_t seed = 0;
  // Visit constraints in a seeded random order each sweep instead of
  // dataset order.
  bool shuffle = false;
  SlackRule slack_rule = SlackRule::kAlgorithm;
  // Full Cholesky check after every update. O(d^3) per update; tests only.
  bool verify_pd_each_update = false;

  void Validate() const;
};

struct ItmlState {
  MahalanobisMatrix a = MahalanobisMatrix::Identity(1);
  std::vector<double> lambdas;
  std::vector<double> xis;
  int sweep_count = 0;
  bool converged = false;
  double last_max_dual_change = 0.0;
  std::size_t updates_applied = 0;
  std::size_t skipped_constraints = 0;
  std::vector<std::string> warnings;
};

// Information-theoretic metric learning by cyclic Bregman projections.
// Each projection applies A <- A + beta (A z)(A z)^T, z = w1 - w2, with
// beta = delta alpha / (1 - delta alpha p); A stays symmetric and is PD as
// long as 1 - delta alpha p > 0, which every accepted step checks.
// a0 defaults to the identity (squared Euclidean distance).
ItmlState ItmlFit(const EmbeddingStore& store, const ConstraintSet& constraints,
                  const BoundPair& bounds, const ItmlConfig& config,
                  const MahalanobisMatrix& a0);
ItmlState ItmlFit(const EmbeddingStore& store, const ConstraintSet& constraints,
                  const BoundPair& bounds, const ItmlConfig& config);

MahalanobisMatrix ExtractDiagonal(const MahalanobisMatrix& a);
MahalanobisMatrix ExtractDiagonal(const ItmlState& state);

struct PairPrediction {
  int label = 0;
  double distance = 0.0;
  double threshold = 0.0;
};

// Label 1 iff h(w1, w2; A) <= (upper + lower) / 2.
PairPrediction ClassifyPair(const MahalanobisMatrix& a, const BoundPair& bounds,
                            const Eigen::Ref<const Vector>& w1,
                            const Eigen::Ref<const Vector>& w2);

// Fraction of constraints whose ClassifyPair label matches. Requires a
// non-empty set.
double PairAccuracy(const MahalanobisMatrix& a, const BoundPair& bounds,
                    const ConstraintSet& set, const EmbeddingStore& store);

// {1e-5, 1e-4, ..., 1e4, 1e5}.
std::vector<double> DefaultGammaGrid();

struct GammaCandidate {
  double gamma = 0.0;
  double dev_accuracy = 0.0;
  int sweeps = 0;
  bool converged = false;
  bool failed = false;
  std::string error;
};

struct SlackSearchResult {
  double best_gamma = 0.0;
  ItmlState best_state;
  // One entry per grid value, in grid order.
  std::vector<GammaCandidate> candidates;
};

// Fits one metric per gamma (base_config supplies everything else), scores
// each on the dev set and returns the most accurate. Ties go to the smaller
// gamma. Fits that throw are recorded as failed; if every fit fails the
// first error is rethrown. Grid points run on up to `workers` threads.
SlackSearchResult SlackSearch(const ConstraintSet& train,
                              const ConstraintSet& dev,
                              const EmbeddingStore& store,
                              std::span<const double> grid,
                              const BoundPair& bounds,
                              const ItmlConfig& base_config,
                              const MahalanobisMatrix& a0,
                              std::size_t workers = 1);

}  // namespace scd

#endif  // SCD_ITML_H_
