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

#include <Eigen/Core>
#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>

#include "scd/errors.h"
#include "scd/parallel.h"

namespace scd {
namespace {

constexpr double kDenominatorFloor = 1e-12;

bool IsConstant(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(),
                     [&](double v) { return v == values.front(); });
}

void CheckDistances(std::span<const double> values, const char* what) {
  if (values.empty()) {
    throw ValidationError(fmt::format("no {} distances to estimate a bound from", what));
  }
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError(fmt::format("{} distance {} is negative or non-finite", what, v));
    }
  }
}

Matrix SymmetricFromUpper(const Matrix& upper) {
  Matrix out = upper.triangularView<Eigen::Upper>();
  out.triangularView<Eigen::StrictlyLower>() = upper.transpose();
  return out;
}

}  // namespace

double NearestRankPercentile(std::vector<double> values, double percentile) {
  if (values.empty()) throw ValidationError("percentile of an empty list");
  if (!(percentile > 0.0 && percentile <= 100.0)) {
    throw ValidationError(fmt::format("percentile {} outside (0, 100]", percentile));
  }
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  auto rank = static_cast<std::size_t>(std::ceil(percentile * n / 100.0));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

BoundPair EstimateBounds(std::span<const double> similar_distances,
                         std::span<const double> dissimilar_distances,
                         const BoundPercentiles& percentiles) {
  CheckDistances(similar_distances, "similar-pair");
  CheckDistances(dissimilar_distances, "dissimilar-pair");

  BoundPair bounds;
  bounds.upper = NearestRankPercentile(
      {similar_distances.begin(), similar_distances.end()}, percentiles.similar);
  bounds.lower = NearestRankPercentile(
      {dissimilar_distances.begin(), dissimilar_distances.end()},
      percentiles.dissimilar);
  if (!(bounds.upper > 0.0) || !(bounds.lower > 0.0)) {
    throw ValidationError(fmt::format(
        "bounds must be positive (upper {}, lower {}); are pairs duplicated?",
        bounds.upper, bounds.lower));
  }
  if (bounds.upper == bounds.lower ||
      (IsConstant(similar_distances) && IsConstant(dissimilar_distances))) {
    bounds.degenerate = true;
    bounds.warnings.push_back(fmt::format(
        "degenerate bounds: upper {} and lower {} come from constant distances",
        bounds.upper, bounds.lower));
  }
  if (bounds.upper > bounds.lower) {
    bounds.warnings.push_back(fmt::format(
        "upper bound {} exceeds lower bound {}: classes overlap heavily",
        bounds.upper, bounds.lower));
  }
  return bounds;
}

ConstraintDistances ComputeConstraintDistances(const EmbeddingStore& store,
                                               const ConstraintSet& constraints,
                                               const MahalanobisMatrix& a) {
  ConstraintDistances out;
  for (const auto& c : constraints.items) {
    const double h = MahalanobisDistance(a, store.Row(c.row1), store.Row(c.row2));
    (c.similar() ? out.similar : out.dissimilar).push_back(h);
  }
  return out;
}

BoundPair EstimateBounds(const EmbeddingStore& store,
                         const ConstraintSet& constraints,
                         const MahalanobisMatrix& a,
                         const BoundPercentiles& percentiles) {
  const ConstraintDistances d = ComputeConstraintDistances(store, constraints, a);
  return EstimateBounds(d.similar, d.dissimilar, percentiles);
}

void ItmlConfig::Validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ValidationError(fmt::format("gamma must be positive, got {}", gamma));
  }
  if (max_sweeps < 1) {
    throw ValidationError(fmt::format("max_sweeps must be >= 1, got {}", max_sweeps));
  }
  if (!(convergence_tol > 0.0)) {
    throw ValidationError(
        fmt::format("convergence_tol must be positive, got {}", convergence_tol));
  }
}

ItmlState ItmlFit(const EmbeddingStore& store, const ConstraintSet& constraints,
                  const BoundPair& bounds, const ItmlConfig& config) {
  return ItmlFit(store, constraints, bounds, config,
                 MahalanobisMatrix::Identity(store.dim()));
}

ItmlState ItmlFit(const EmbeddingStore& store, const ConstraintSet& constraints,
                  const BoundPair& bounds, const ItmlConfig& config,
                  const MahalanobisMatrix& a0) {
  config.Validate();
  if (!(bounds.upper > 0.0) || !(bounds.lower > 0.0)) {
    throw ValidationError("ITML bounds must be positive");
  }
  if (a0.dim() != store.dim()) {
    throw ShapeError(fmt::format("initial metric dimension {} != store dimension {}",
                                 a0.dim(), store.dim()));
  }
  const PdCheck a0_check = CheckPositiveDefinite(a0);
  if (!a0_check.positive_definite) {
    throw ValidationError(fmt::format(
        "initial metric is not positive definite (pivot {} at {})",
        a0_check.smallest_pivot, a0_check.failed_at));
  }

  const std::size_t n = constraints.size();
  ItmlState state;
  state.lambdas.assign(n, 0.0);
  state.xis.resize(n);
  if (n == 0) {
    state.a = a0;
    state.converged = true;
    return state;
  }

  const auto d = static_cast<Eigen::Index>(store.dim());
  Matrix diffs(d, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const Constraint& c = constraints.items[i];
    if (c.row1 >= store.size() || c.row2 >= store.size()) {
      throw DataError(fmt::format("constraint {} refers to a row outside the store", i));
    }
    diffs.col(static_cast<Eigen::Index>(i)) = store.Row(c.row1) - store.Row(c.row2);
    state.xis[i] = c.similar() ? bounds.upper : bounds.lower;
  }

  // Only the upper triangle of `a` is maintained during the sweeps.
  Matrix a = a0.ToDense();
  Vector az(d);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed);
  std::vector<bool> warned_zero(n, false);
  bool warned_clamp = false;

  const double gamma = config.gamma;
  const double gamma_proj = gamma / (gamma + 1.0);

  for (int sweep = 0; sweep < config.max_sweeps; ++sweep) {
    if (config.shuffle) std::shuffle(order.begin(), order.end(), rng);
    double max_change = 0.0;

    for (std::size_t i : order) {
      const auto z = diffs.col(static_cast<Eigen::Index>(i));
      az.noalias() = a.selfadjointView<Eigen::Upper>() * z;
      const double p = z.dot(az);
      const bool similar = constraints.items[i].similar();
      if (!(p > 0.0)) {
        // The projection divides by p; a zero difference cannot be moved.
        if (!similar && !warned_zero[i]) {
          warned_zero[i] = true;
          ++state.skipped_constraints;
          state.warnings.push_back(fmt::format(
              "constraint {}: dissimilar pair at zero distance skipped", i));
        }
        continue;
      }

      const double delta = similar ? 1.0 : -1.0;
      double& lambda = state.lambdas[i];
      double& xi = state.xis[i];

      double alpha;
      if (config.slack_rule == SlackRule::kAlgorithm) {
        alpha = std::min(lambda, delta * (1.0 / p - gamma / xi) / 2.0);
      } else {
        alpha = std::min(lambda, delta * gamma_proj * (1.0 / p - 1.0 / xi));
      }
      if (alpha == 0.0) continue;

      double denom = 1.0 - delta * alpha * p;
      while (std::abs(denom) <= kDenominatorFloor && alpha != 0.0) {
        alpha *= 0.5;
        denom = 1.0 - delta * alpha * p;
        if (!warned_clamp) {
          warned_clamp = true;
          state.warnings.push_back(fmt::format(
              "constraint {}: projection denominator near zero, step shrunk", i));
        }
      }
      if (!(denom > 0.0)) {
        throw NumericError(fmt::format(
            "constraint {} (sweep {}): update would lose positive definiteness "
            "(1 - delta*alpha*p = {:g}, alpha {:g}, p {:g})",
            i, sweep, denom, alpha, p));
      }

      if (config.slack_rule == SlackRule::kAlgorithm) {
        xi = gamma * xi / (gamma + delta * alpha * xi);
      } else {
        xi = 1.0 / (1.0 / xi + delta * alpha / gamma);
      }
      lambda -= alpha;
      max_change = std::max(max_change, std::abs(alpha));

      const double beta = delta * alpha / denom;
      a.selfadjointView<Eigen::Upper>().rankUpdate(az, beta);
      ++state.updates_applied;

      if (config.verify_pd_each_update) {
        const PdCheck check =
            CheckPositiveDefinite(MahalanobisMatrix::Full(SymmetricFromUpper(a)));
        if (!check.positive_definite) {
          throw NumericError(fmt::format(
              "constraint {} (sweep {}): metric lost positive definiteness "
              "(pivot {:g} at {})",
              i, sweep, check.smallest_pivot, check.failed_at));
        }
      }
    }

    state.sweep_count = sweep + 1;
    state.last_max_dual_change = max_change;
    if (max_change <= config.convergence_tol) {
      state.converged = true;
      break;
    }
  }

  if (!a.allFinite()) throw NumericError("ITML produced non-finite metric entries");
  state.a = MahalanobisMatrix::Full(SymmetricFromUpper(a));
  return state;
}

MahalanobisMatrix ExtractDiagonal(const MahalanobisMatrix& a) {
  return MahalanobisMatrix::Diagonal(a.diagonal());
}

MahalanobisMatrix ExtractDiagonal(const ItmlState& state) {
  return ExtractDiagonal(state.a);
}

PairPrediction ClassifyPair(const MahalanobisMatrix& a, const BoundPair& bounds,
                            const Eigen::Ref<const Vector>& w1,
                            const Eigen::Ref<const Vector>& w2) {
  PairPrediction out;
  out.distance = MahalanobisDistance(a, w1, w2);
  out.threshold = bounds.midpoint();
  out.label = out.distance <= out.threshold ? 1 : 0;
  return out;
}

double PairAccuracy(const MahalanobisMatrix& a, const BoundPair& bounds,
                    const ConstraintSet& set, const EmbeddingStore& store) {
  if (set.empty()) throw ValidationError("accuracy of an empty constraint set");
  std::size_t correct = 0;
  for (const auto& c : set.items) {
    const PairPrediction pred = ClassifyPair(a, bounds, store.Row(c.row1), store.Row(c.row2));
    if (pred.label == c.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(set.size());
}

std::vector<double> DefaultGammaGrid() {
  return {1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1e0, 1e1, 1e2, 1e3, 1e4, 1e5};
}

SlackSearchResult SlackSearch(const ConstraintSet& train,
                              const ConstraintSet& dev,
                              const EmbeddingStore& store,
                              std::span<const double> grid,
                              const BoundPair& bounds,
                              const ItmlConfig& base_config,
                              const MahalanobisMatrix& a0,
                              std::size_t workers) {
  if (grid.empty()) throw ValidationError("slack search grid is empty");
  if (dev.empty()) throw ValidationError("slack search needs a non-empty dev set");

  std::vector<GammaCandidate> candidates(grid.size());
  std::vector<std::optional<ItmlState>> states(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());

  ParallelFor(grid.size(), workers, [&](std::size_t k) {
    GammaCandidate& cand = candidates[k];
    cand.gamma = grid[k];
    try {
      ItmlConfig config = base_config;
      config.gamma = grid[k];
      ItmlState state = ItmlFit(store, train, bounds, config, a0);
      cand.sweeps = state.sweep_count;
      cand.converged = state.converged;
      cand.dev_accuracy = PairAccuracy(state.a, bounds, dev, store);
      states[k] = std::move(state);
    } catch (const std::exception& e) {
      cand.failed = true;
      cand.error = e.what();
      errors[k] = std::current_exception();
    }
  });

  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (candidates[k].failed) continue;
    if (!best) {
      best = k;
      continue;
    }
    const GammaCandidate& b = candidates[*best];
    const GammaCandidate& c = candidates[k];
    if (c.dev_accuracy > b.dev_accuracy ||
        (c.dev_accuracy == b.dev_accuracy && c.gamma < b.gamma)) {
      best = k;
    }
  }
  if (!best) std::rethrow_exception(errors.front());

  SlackSearchResult result;
  result.best_gamma = candidates[*best].gamma;
  result.best_state = std::move(*states[*best]);
  result.candidates = std::move(candidates);
  return result;
}

}  // namespace scd
