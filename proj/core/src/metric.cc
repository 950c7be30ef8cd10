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

#include "scd/metric.h"

#include <Eigen/Cholesky>
#include <fmt/core.h>

#include <cmath>
#include <utility>

#include "scd/errors.h"

namespace scd {

const char* MetricModeName(MetricMode mode) {
  return mode == MetricMode::kDiagonal ? "diagonal" : "full";
}

MahalanobisMatrix::MahalanobisMatrix(MetricMode mode, Matrix full,
                                     Vector diagonal)
    : mode_(mode), full_(std::move(full)), diagonal_(std::move(diagonal)) {}

MahalanobisMatrix MahalanobisMatrix::Identity(std::size_t dim) {
  if (dim == 0) throw ShapeError("metric dimension must be positive");
  const auto n = static_cast<Eigen::Index>(dim);
  return MahalanobisMatrix(MetricMode::kFull, Matrix::Identity(n, n),
                           Vector::Ones(n));
}

MahalanobisMatrix MahalanobisMatrix::Full(Matrix entries) {
  if (entries.rows() == 0 || entries.rows() != entries.cols()) {
    throw ShapeError(fmt::format("metric must be square and non-empty, got {}x{}",
                                 entries.rows(), entries.cols()));
  }
  if (!entries.allFinite()) throw NumericError("metric has non-finite entries");
  const double asym = (entries - entries.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance) {
    throw ValidationError(
        fmt::format("metric is not symmetric (max |A_ij - A_ji| = {:g})", asym));
  }
  Vector diag = entries.diagonal();
  return MahalanobisMatrix(MetricMode::kFull, std::move(entries),
                           std::move(diag));
}

MahalanobisMatrix MahalanobisMatrix::Diagonal(Vector diagonal) {
  if (diagonal.size() == 0) throw ShapeError("metric dimension must be positive");
  if (!diagonal.allFinite()) throw NumericError("metric has non-finite entries");
  return MahalanobisMatrix(MetricMode::kDiagonal, Matrix(), std::move(diagonal));
}

double MahalanobisMatrix::operator()(std::size_t i, std::size_t j) const {
  const auto r = static_cast<Eigen::Index>(i);
  const auto c = static_cast<Eigen::Index>(j);
  if (mode_ == MetricMode::kDiagonal) return i == j ? diagonal_(r) : 0.0;
  return full_(r, c);
}

Matrix MahalanobisMatrix::ToDense() const {
  if (mode_ == MetricMode::kDiagonal) return diagonal_.asDiagonal();
  return full_;
}

MahalanobisMatrix MahalanobisMatrix::Scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw ValidationError("metric scale factor must be positive and finite");
  }
  return MahalanobisMatrix(mode_, full_ * factor, diagonal_ * factor);
}

void RequireFinite(const Eigen::Ref<const Vector>& v, const char* what) {
  if (!v.allFinite()) {
    throw NumericError(fmt::format("{} contains non-finite values", what));
  }
}

double MahalanobisDistance(const MahalanobisMatrix& a,
                           const Eigen::Ref<const Vector>& w1,
                           const Eigen::Ref<const Vector>& w2) {
  const auto d = static_cast<Eigen::Index>(a.dim());
  if (w1.size() != d || w2.size() != d) {
    throw ShapeError(fmt::format(
        "embedding dimensions ({}, {}) do not match metric dimension {}",
        w1.size(), w2.size(), d));
  }
  RequireFinite(w1, "embedding");
  RequireFinite(w2, "embedding");

  const Vector z = w1 - w2;
  double h;
  if (a.is_diagonal()) {
    h = (a.diagonal().array() * z.array().square()).sum();
  } else {
    h = z.dot(a.full() * z);
  }
  if (h < 0.0) {
    if (h < -kNegativeDistanceTolerance) {
      throw NumericError(fmt::format(
          "negative squared distance {:g}: metric is not positive definite", h));
    }
    h = 0.0;
  }
  return h;
}

PdCheck CheckPositiveDefinite(const MahalanobisMatrix& a) {
  PdCheck out;
  const auto n = static_cast<Eigen::Index>(a.dim());
  if (a.is_diagonal()) {
    out.positive_definite = true;
    out.smallest_pivot = a.diagonal()(0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double p = a.diagonal()(i);
      if (p < out.smallest_pivot) out.smallest_pivot = p;
      if (!(p > kMinPivot)) {
        out.positive_definite = false;
        out.smallest_pivot = p;
        out.failed_at = static_cast<std::size_t>(i);
        return out;
      }
    }
    return out;
  }

  // Plain right-looking Cholesky so the failing pivot can be reported.
  Matrix l = Matrix::Zero(n, n);
  const Matrix& m = a.full();
  out.positive_definite = true;
  out.smallest_pivot = m(0, 0);
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = m(j, j) - l.row(j).head(j).squaredNorm();
    if (pivot < out.smallest_pivot) out.smallest_pivot = pivot;
    if (!(pivot > kMinPivot)) {
      out.positive_definite = false;
      out.smallest_pivot = pivot;
      out.failed_at = static_cast<std::size_t>(j);
      return out;
    }
    const double ljj = std::sqrt(pivot);
    l(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      l(i, j) = (m(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / ljj;
    }
  }
  return out;
}

Matrix CholeskyLower(const MahalanobisMatrix& a) {
  if (a.is_diagonal()) {
    if (!(a.diagonal().array() > kMinPivot).all()) {
      throw NumericError("metric is not positive definite");
    }
    return Matrix(a.diagonal().cwiseSqrt().asDiagonal());
  }
  Eigen::LLT<Matrix> llt(a.full());
  if (llt.info() != Eigen::Success ||
      !(llt.matrixL().toDenseMatrix().diagonal().array().square() > kMinPivot)
           .all()) {
    throw NumericError("metric is not positive definite");
  }
  return llt.matrixL();
}

namespace {

bool IsExactIdentity(const MahalanobisMatrix& a) {
  if (a.is_diagonal()) return (a.diagonal().array() == 1.0).all();
  const auto n = a.full().rows();
  return a.full() == Matrix::Identity(n, n);
}

double LogDetFromCholesky(const Matrix& l) {
  return 2.0 * l.diagonal().array().log().sum();
}

}  // namespace

double GaussianKl(const GaussianPair& pair) {
  const std::size_t d = pair.a.dim();
  if (pair.a0.dim() != d || static_cast<std::size_t>(pair.mean.size()) != d) {
    throw ShapeError("gaussian pair dimensions disagree");
  }

  if (pair.a.ToDense() == pair.a0.ToDense()) {
    CholeskyLower(pair.a0);
    return 0.0;
  }

  Matrix l0;
  try {
    l0 = CholeskyLower(pair.a0);
  } catch (const NumericError&) {
    throw NumericError("reference precision matrix A0 is singular or not PD");
  }
  const Matrix l = CholeskyLower(pair.a);
  const double logdet_a = LogDetFromCholesky(l);

  double trace;
  double logdet_a0;
  if (IsExactIdentity(pair.a0)) {
    trace = pair.a.ToDense().trace();
    logdet_a0 = 0.0;
  } else {
    // tr(A A0^-1) = ||L0^-1 L||_F^2 with A = L L^T and A0 = L0 L0^T.
    const Matrix x = l0.triangularView<Eigen::Lower>().solve(l);
    trace = x.squaredNorm();
    logdet_a0 = LogDetFromCholesky(l0);
  }
  double kl = 0.5 * (trace - static_cast<double>(d) - (logdet_a - logdet_a0));
  if (kl < 0.0) {
    if (kl < -kNegativeDistanceTolerance) {
      throw NumericError(fmt::format("negative divergence {:g}", kl));
    }
    kl = 0.0;
  }
  return kl;
}

Vector RowImportance(const MahalanobisMatrix& a) {
  if (a.is_diagonal()) return a.diagonal().cwiseAbs();
  return a.full().rowwise().norm();
}

}  // namespace scd
