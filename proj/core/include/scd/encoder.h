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

#ifndef SCD_ENCODER_H_
#define SCD_ENCODER_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "scd/metric.h"

namespace scd {

inline constexpr double kMinNorm = 1e-12;

// 1 - cos(w1, w2), in [0, 2]. Throws NumericError if either norm <= 1e-12.
double CosineDistance(const Eigen::Ref<const Vector>& w1,
                      const Eigen::Ref<const Vector>& w2);

// 1/2 (y delta^2 + (1 - y) max(0, m - delta)^2) with delta the cosine
// distance between w1 and w2.
double ContrastiveLoss(const Eigen::Ref<const Vector>& w1,
                       const Eigen::Ref<const Vector>& w2, int label,
                       double margin);

// A linear map W (k x d) applied to both sides of a pair.
class ProjectionHead {
 public:
  explicit ProjectionHead(Matrix weights);
  // First k rows of the d x d identity.
  static ProjectionHead TruncatedIdentity(std::size_t out_dim, std::size_t in_dim);

  std::size_t in_dim() const { return static_cast<std::size_t>(weights_.cols()); }
  std::size_t out_dim() const { return static_cast<std::size_t>(weights_.rows()); }
  const Matrix& weights() const { return weights_; }
  Matrix& mutable_weights() { return weights_; }

  Vector Project(const Eigen::Ref<const Vector>& x) const;

 private:
  Matrix weights_;
};

double ContrastiveLoss(const ProjectionHead& head,
                       const Eigen::Ref<const Vector>& w1,
                       const Eigen::Ref<const Vector>& w2, int label,
                       double margin);

// d loss / d W for the pair (W w1, W w2). At the hinge kink (label 0,
// delta == margin) the zero subgradient is returned.
Matrix ContrastiveGrad(const ProjectionHead& head,
                       const Eigen::Ref<const Vector>& w1,
                       const Eigen::Ref<const Vector>& w2, int label,
                       double margin);

struct TrainConfig {
  double margin = 0.5;
  double learning_rate = 1e-5;
  double weight_decay = 0.01;
  int epochs = 10;
  int batch_size = 32;
  std::uint64_t seed = 0;
  // 0 keeps the input dimension.
  std::size_t out_dim = 0;
  // Std-dev of the Gaussian noise added to the truncated-identity init.
  double init_noise = 1e-3;

  void Validate() const;
};

struct LabeledPair {
  Vector first;
  Vector second;
  int label = 0;
};

struct TrainResult {
  ProjectionHead head;
  // Mean per-pair loss over each epoch, measured as batches are visited.
  std::vector<double> epoch_loss;
};

// Minibatch AdamW (beta1 0.9, beta2 0.999, eps 1e-8, decoupled weight
// decay). Deterministic for a fixed seed. Throws NumericError if the loss
// becomes non-finite.
TrainResult TrainProjection(std::span<const LabeledPair> pairs,
                            const TrainConfig& config);

// "SCDP", version u32, mode u8 (always 0), rows u32, cols u32, then
// rows*cols float64 values row-major, little-endian.
void WriteProjectionHead(const ProjectionHead& head, const std::string& path);
ProjectionHead ReadProjectionHead(const std::string& path);

}  // namespace scd

#endif  // SCD_ENCODER_H_
