// Copyright 2026 The gpdistill Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gpdistill/linalg.hpp"

#include <cmath>
#include <string>

#include "gpdistill/error.hpp"

namespace gpdistill {

Cholesky::Cholesky(const Matrix& a) {
  detail::require(a.rows() == a.cols(), "Cholesky: matrix must be square");
  if (!a.allFinite()) {
    throw NumericalError("Cholesky: matrix has non-finite entries");
  }
  lower_ = a;
  // Blocked in-place factorization; returns the failing column or -1.
  const Index failed =
      Eigen::internal::llt_inplace<double, Eigen::Lower>::blocked(lower_);
  if (failed >= 0) {
    throw FactorizationError(
        static_cast<std::size_t>(failed),
        "Cholesky factorization failed: non-positive pivot at index " +
            std::to_string(failed) + " of " + std::to_string(a.rows()));
  }
  lower_.triangularView<Eigen::StrictlyUpper>().setZero();
}

Cholesky Cholesky::from_factor(Matrix lower) {
  detail::require(lower.rows() == lower.cols(),
                  "Cholesky::from_factor: factor must be square");
  Cholesky out;
  out.lower_ = std::move(lower);
  out.lower_.triangularView<Eigen::StrictlyUpper>().setZero();
  return out;
}

Matrix Cholesky::solve(const Matrix& rhs) const {
  detail::require(rhs.rows() == size(), "Cholesky::solve: row mismatch");
  Matrix x = lower_.triangularView<Eigen::Lower>().solve(rhs);
  lower_.transpose().triangularView<Eigen::Upper>().solveInPlace(x);
  return x;
}

Vector Cholesky::solve(const Vector& rhs) const {
  detail::require(rhs.size() == size(), "Cholesky::solve: size mismatch");
  Vector x = lower_.triangularView<Eigen::Lower>().solve(rhs);
  lower_.transpose().triangularView<Eigen::Upper>().solveInPlace(x);
  return x;
}

Matrix Cholesky::solve_lower(const Matrix& rhs) const {
  detail::require(rhs.rows() == size(), "Cholesky::solve_lower: row mismatch");
  return lower_.triangularView<Eigen::Lower>().solve(rhs);
}

Vector Cholesky::solve_lower(const Vector& rhs) const {
  detail::require(rhs.size() == size(), "Cholesky::solve_lower: size mismatch");
  return lower_.triangularView<Eigen::Lower>().solve(rhs);
}

double Cholesky::half_log_det() const {
  return lower_.diagonal().array().log().sum();
}

Matrix Cholesky::inverse() const {
  Matrix linv = solve_lower(Matrix(Matrix::Identity(size(), size())));
  Matrix inv = linv.transpose() * linv;
  return symmetrized(inv);
}

Matrix Cholesky::reconstruct() const {
  return lower_ * lower_.transpose();
}

JitteredCholesky cholesky_with_jitter(const Matrix& a, double start_rel,
                                      double max_rel) {
  try {
    return {Cholesky(a), 0.0};
  } catch (const FactorizationError&) {
  }
  const double mean_diag = a.diagonal().mean();
  const double scale = mean_diag > 0.0 ? mean_diag : 1.0;
  std::size_t last_pivot = 0;
  // Multiplying the relative jitter by 10 from 1e-8 reaches 1e-4 in four
  // steps; the small slack absorbs rounding in the repeated product.
  for (double rel = start_rel; rel <= max_rel * (1.0 + 1e-9); rel *= 10.0) {
    Matrix shifted = a;
    shifted.diagonal().array() += rel * scale;
    try {
      return {Cholesky(shifted), rel * scale};
    } catch (const FactorizationError& e) {
      last_pivot = e.pivot();
    }
  }
  throw FactorizationError(
      last_pivot, "Cholesky failed even with jitter " + std::to_string(max_rel) +
                      " x mean diagonal (last bad pivot " +
                      std::to_string(last_pivot) + ")");
}

Matrix spd_solve(const Matrix& a, const Matrix& b) {
  detail::require(a.rows() == a.cols(), "spd_solve: A must be square");
  detail::require(b.rows() == a.rows(), "spd_solve: B row count must match A");
  const double asym = (a - a.transpose()).norm();
  detail::require(asym <= 1e-10 * a.norm(), "spd_solve: A is not symmetric");
  return Cholesky(a).solve(b);
}

Vector least_squares(const Matrix& a, const Vector& b) {
  detail::require(a.rows() >= 1 && a.cols() >= 1,
                  "least_squares: A must be non-empty");
  detail::require(b.size() == a.rows(), "least_squares: b length must match A rows");
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
  return cod.solve(b);
}

double fro_diff(const Matrix& a, const Matrix& b) {
  detail::require(a.rows() == b.rows() && a.cols() == b.cols(),
                  "fro_diff: shape mismatch");
  return (a - b).norm();
}

Matrix symmetrized(const Matrix& a) {
  return 0.5 * (a + a.transpose());
}

}  // namespace gpdistill
