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

#include "scd/encoder.h"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "binary_io.h"
#include "scd/errors.h"
#include "scd/matrix_io.h"

namespace scd {
namespace {

void CheckMargin(double margin) {
  if (!(margin > 0.0 && margin < 2.0)) {
    throw ValidationError(fmt::format("margin must lie in (0, 2), got {}", margin));
  }
}

void CheckLabel(int label) {
  if (label != 0 && label != 1) {
    throw ValidationError(fmt::format("label must be 0 or 1, got {}", label));
  }
}

// d loss / d delta.
double LossSlope(double delta, int label, double margin) {
  if (label == 1) return delta;
  const double gap = margin - delta;
  return gap > 0.0 ? -gap : 0.0;
}

}  // namespace

double CosineDistance(const Eigen::Ref<const Vector>& w1,
                      const Eigen::Ref<const Vector>& w2) {
  if (w1.size() != w2.size()) {
    throw ShapeError(fmt::format("cosine distance of vectors with sizes {} and {}",
                                 w1.size(), w2.size()));
  }
  const double n1 = w1.norm();
  const double n2 = w2.norm();
  if (!(n1 > kMinNorm) || !(n2 > kMinNorm)) {
    throw NumericError("cosine distance of a (near) zero-norm vector");
  }
  const double cos = std::clamp(w1.dot(w2) / (n1 * n2), -1.0, 1.0);
  return 1.0 - cos;
}

double ContrastiveLoss(const Eigen::Ref<const Vector>& w1,
                       const Eigen::Ref<const Vector>& w2, int label,
                       double margin) {
  CheckLabel(label);
  CheckMargin(margin);
  const double delta = CosineDistance(w1, w2);
  if (label == 1) return 0.5 * delta * delta;
  const double gap = std::max(0.0, margin - delta);
  return 0.5 * gap * gap;
}

ProjectionHead::ProjectionHead(Matrix weights) : weights_(std::move(weights)) {
  if (weights_.rows() == 0 || weights_.cols() == 0) {
    throw ShapeError("projection head must be non-empty");
  }
  if (weights_.rows() > weights_.cols()) {
    throw ShapeError(fmt::format("projection head output {} exceeds input {}",
                                 weights_.rows(), weights_.cols()));
  }
  if (!weights_.allFinite()) throw NumericError("projection head has non-finite weights");
}

ProjectionHead ProjectionHead::TruncatedIdentity(std::size_t out_dim,
                                                 std::size_t in_dim) {
  const auto k = static_cast<Eigen::Index>(out_dim);
  const auto d = static_cast<Eigen::Index>(in_dim);
  return ProjectionHead(Matrix::Identity(k, d));
}

Vector ProjectionHead::Project(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != weights_.cols()) {
    throw ShapeError(fmt::format("input of size {} for projection head with input {}",
                                 x.size(), weights_.cols()));
  }
  return weights_ * x;
}

double ContrastiveLoss(const ProjectionHead& head,
                       const Eigen::Ref<const Vector>& w1,
                       const Eigen::Ref<const Vector>& w2, int label,
                       double margin) {
  return ContrastiveLoss(head.Project(w1), head.Project(w2), label, margin);
}

Matrix ContrastiveGrad(const ProjectionHead& head,
                       const Eigen::Ref<const Vector>& w1,
                       const Eigen::Ref<const Vector>& w2, int label,
                       double margin) {
  CheckLabel(label);
  CheckMargin(margin);
  const Vector p1 = head.Project(w1);
  const Vector p2 = head.Project(w2);
  const double n1 = p1.norm();
  const double n2 = p2.norm();
  if (!(n1 > kMinNorm) || !(n2 > kMinNorm)) {
    throw NumericError("contrastive gradient at a (near) zero-norm projection");
  }
  const double cos = p1.dot(p2) / (n1 * n2);
  const double delta = 1.0 - cos;
  const double slope = LossSlope(delta, label, margin);

  Matrix grad = Matrix::Zero(head.weights().rows(), head.weights().cols());
  if (slope == 0.0) return grad;

  // delta = 1 - cos, so d loss / d p = -slope * d cos / d p.
  const Vector dcos_dp1 = p2 / (n1 * n2) - (cos / (n1 * n1)) * p1;
  const Vector dcos_dp2 = p1 / (n1 * n2) - (cos / (n2 * n2)) * p2;
  grad.noalias() -= slope * dcos_dp1 * w1.transpose();
  grad.noalias() -= slope * dcos_dp2 * w2.transpose();
  return grad;
}

void TrainConfig::Validate() const {
  CheckMargin(margin);
  if (!(learning_rate > 0.0)) throw ValidationError("learning_rate must be positive");
  if (!(weight_decay >= 0.0)) throw ValidationError("weight_decay must be non-negative");
  if (epochs < 1) throw ValidationError("epochs must be >= 1");
  if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
  if (!(init_noise >= 0.0)) throw ValidationError("init_noise must be non-negative");
}

TrainResult TrainProjection(std::span<const LabeledPair> pairs,
                            const TrainConfig& config) {
  config.Validate();
  if (pairs.empty()) throw ValidationError("no training pairs");
  const bool has_similar = std::any_of(pairs.begin(), pairs.end(),
                                       [](const LabeledPair& p) { return p.label == 1; });
  const bool has_dissimilar = std::any_of(
      pairs.begin(), pairs.end(), [](const LabeledPair& p) { return p.label == 0; });
  if (!has_similar || !has_dissimilar) {
    throw ValidationError("training needs at least one pair of each label");
  }
  const std::size_t in_dim = static_cast<std::size_t>(pairs.front().first.size());
  for (const auto& p : pairs) {
    CheckLabel(p.label);
    if (static_cast<std::size_t>(p.first.size()) != in_dim ||
        static_cast<std::size_t>(p.second.size()) != in_dim) {
      throw ShapeError("training pairs have inconsistent dimensions");
    }
  }
  const std::size_t out_dim = config.out_dim == 0 ? in_dim : config.out_dim;

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> noise(0.0, config.init_noise);
  Matrix init = ProjectionHead::TruncatedIdentity(out_dim, in_dim).weights();
  if (config.init_noise > 0.0) {
    for (Eigen::Index j = 0; j < init.cols(); ++j) {
      for (Eigen::Index i = 0; i < init.rows(); ++i) init(i, j) += noise(rng);
    }
  }
  TrainResult result{ProjectionHead(std::move(init)), {}};
  Matrix& w = result.head.mutable_weights();

  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  Matrix m = Matrix::Zero(w.rows(), w.cols());
  Matrix v = Matrix::Zero(w.rows(), w.cols());
  Matrix grad(w.rows(), w.cols());
  long long step = 0;

  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  const auto batch = static_cast<std::size_t>(config.batch_size);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      grad.setZero();
      for (std::size_t k = start; k < end; ++k) {
        const LabeledPair& p = pairs[order[k]];
        epoch_loss += ContrastiveLoss(result.head, p.first, p.second, p.label,
                                      config.margin);
        grad += ContrastiveGrad(result.head, p.first, p.second, p.label,
                                config.margin);
      }
      grad /= static_cast<double>(end - start);

      ++step;
      m = kBeta1 * m + (1.0 - kBeta1) * grad;
      v = kBeta2 * v + (1.0 - kBeta2) * grad.cwiseAbs2();
      const double bias1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
      const double bias2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
      w *= 1.0 - config.learning_rate * config.weight_decay;
      w.array() -= config.learning_rate * (m.array() / bias1) /
                   ((v.array() / bias2).sqrt() + kEps);
    }
    epoch_loss /= static_cast<double>(pairs.size());
    result.epoch_loss.push_back(epoch_loss);
    if (!std::isfinite(epoch_loss) || !w.allFinite()) {
      std::string trace;
      for (double l : result.epoch_loss) trace += fmt::format(" {}", l);
      throw NumericError(fmt::format("training diverged at epoch {}; loss trace:{}",
                                     epoch, trace));
    }
  }
  return result;
}

void WriteProjectionHead(const ProjectionHead& head, const std::string& path) {
  internal::ByteWriter w;
  w.PutBytes("SCDP");
  w.PutU32(kMatrixFormatVersion);
  w.PutU8(0);
  w.PutU32(static_cast<std::uint32_t>(head.out_dim()));
  w.PutU32(static_cast<std::uint32_t>(head.in_dim()));
  const Matrix& m = head.weights();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) w.PutF64(m(i, j));
  }
  internal::WriteFileAtomic(path, w.bytes());
}

ProjectionHead ReadProjectionHead(const std::string& path) {
  const std::string bytes = internal::ReadFileBytes(path);
  internal::ByteReader r(bytes, path);
  if (r.GetBytes(4) != "SCDP") {
    throw FormatError(fmt::format("{}: not a projection head file (bad magic)", path));
  }
  const std::uint32_t version = r.GetU32();
  if (version != kMatrixFormatVersion) {
    throw FormatError(fmt::format("{}: unsupported version {}", path, version));
  }
  if (r.GetU8() != 0) throw FormatError(fmt::format("{}: unexpected mode flag", path));
  const std::uint32_t rows = r.GetU32();
  const std::uint32_t cols = r.GetU32();
  if (rows == 0 || cols == 0) throw FormatError(fmt::format("{}: empty head", path));
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = r.GetF64();
  }
  r.ExpectEnd();
  return ProjectionHead(std::move(m));
}

}  // namespace scd
