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

#ifndef SCD_METRIC_H_
#define SCD_METRIC_H_

#include <Eigen/Core>

#include <cstddef>

namespace scd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Tolerances shared across the metric primitives.
inline constexpr double kSymmetryTolerance = 1e-8;
inline constexpr double kNegativeDistanceTolerance = 1e-9;
inline constexpr double kMinPivot = 1e-12;

enum class MetricMode : unsigned char { kFull = 0, kDiagonal = 1 };

const char* MetricModeName(MetricMode mode);

// Symmetric matrix A defining h(x, y) = (x - y)^T A (x - y).
//
// A diagonal-mode matrix stores only its d diagonal entries but answers the
// same element queries as a full one; off-diagonal entries read as zero.
// Construction checks finiteness and symmetry only. Positive definiteness is
// a separate question (see CheckPositiveDefinite) so that indefinite inputs
// can still be represented and diagnosed.
class MahalanobisMatrix {
 public:
  static MahalanobisMatrix Identity(std::size_t dim);
  static MahalanobisMatrix Full(Matrix entries);
  static MahalanobisMatrix Diagonal(Vector diagonal);

  MetricMode mode() const { return mode_; }
  std::size_t dim() const { return static_cast<std::size_t>(diagonal_.size()); }
  bool is_diagonal() const { return mode_ == MetricMode::kDiagonal; }

  double operator()(std::size_t i, std::size_t j) const;

  // Dense d x d copy, regardless of mode.
  Matrix ToDense() const;
  const Vector& diagonal() const { return diagonal_; }
  // Only meaningful in full mode.
  const Matrix& full() const { return full_; }

  // Multiplies every entry by a positive factor.
  MahalanobisMatrix Scaled(double factor) const;

 private:
  MahalanobisMatrix(MetricMode mode, Matrix full, Vector diagonal);

  MetricMode mode_;
  Matrix full_;
  Vector diagonal_;
};

// Throws NumericError when any entry is NaN or infinite.
void RequireFinite(const Eigen::Ref<const Vector>& v, const char* what);

// (w1 - w2)^T A (w1 - w2). Results in [-1e-9, 0) are clamped to zero; more
// negative values mean A is not PD and raise NumericError.
double MahalanobisDistance(const MahalanobisMatrix& a,
                           const Eigen::Ref<const Vector>& w1,
                           const Eigen::Ref<const Vector>& w2);

struct PdCheck {
  bool positive_definite = false;
  // Smallest Cholesky pivot (the value under the square root). For a failed
  // factorization this is the first pivot that fell below the threshold.
  double smallest_pivot = 0.0;
  std::size_t failed_at = 0;
};

PdCheck CheckPositiveDefinite(const MahalanobisMatrix& a);

// Lower-triangular L with A = L L^T. Throws NumericError if A is not PD.
Matrix CholeskyLower(const MahalanobisMatrix& a);

// Two equal-mean Gaussians with precision matrices a0 and a. The mean does
// not affect the divergence but is kept for dimension checking.
struct GaussianPair {
  MahalanobisMatrix a0;
  MahalanobisMatrix a;
  Vector mean;
};

// KL(N(mean, a0^-1) || N(mean, a^-1))
//   = 1/2 [tr(A A0^-1) - d - ln det(A A0^-1)].
double GaussianKl(const GaussianPair& pair);

// Euclidean norm of each row of A.
Vector RowImportance(const MahalanobisMatrix& a);

}  // namespace scd

#endif  // SCD_METRIC_H_
