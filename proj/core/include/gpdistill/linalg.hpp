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

#ifndef GPDISTILL_LINALG_HPP_
#define GPDISTILL_LINALG_HPP_

#include <Eigen/Dense>

namespace gpdistill {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Lower Cholesky factor L of a symmetric positive definite A = L L^T.
class Cholesky {
 public:
  Cholesky() = default;

  // Throws FactorizationError naming the first non-positive pivot.
  explicit Cholesky(const Matrix& a);

  // Wraps an existing lower-triangular factor (e.g. one read from disk).
  static Cholesky from_factor(Matrix lower);

  Index size() const { return lower_.rows(); }
  const Matrix& lower() const { return lower_; }

  Matrix solve(const Matrix& rhs) const;
  Vector solve(const Vector& rhs) const;
  // L^{-1} rhs.
  Matrix solve_lower(const Matrix& rhs) const;
  Vector solve_lower(const Vector& rhs) const;

  // sum_i log L_ii.
  double half_log_det() const;
  // A^{-1}, symmetric.
  Matrix inverse() const;
  // L L^T.
  Matrix reconstruct() const;

 private:
  Matrix lower_;
};

// Factorization of A + jitter*I with the jitter that made it succeed.
struct JitteredCholesky {
  Cholesky factor;
  double jitter = 0.0;
};

// Tries A first; on failure adds start_rel * mean(diag A) and escalates by
// x10 until max_rel * mean(diag A). Throws FactorizationError past that.
JitteredCholesky cholesky_with_jitter(const Matrix& a, double start_rel = 1e-8,
                                      double max_rel = 1e-4);

// Solves A X = B for symmetric positive definite A by Cholesky.
// Throws ContractViolation if A is not symmetric within 1e-10 ||A||_F and
// FactorizationError if it is not positive definite.
Matrix spd_solve(const Matrix& a, const Matrix& b);

// Minimum-norm minimizer of ||A x - b||_2 for a p x q matrix A. Uses a
// rank-revealing complete orthogonal decomposition, so rank-deficient and
// underdetermined systems are fine.
Vector least_squares(const Matrix& a, const Vector& b);

// Frobenius norm of A - B. Throws ContractViolation on shape mismatch.
double fro_diff(const Matrix& a, const Matrix& b);

// (A + A^T) / 2.
Matrix symmetrized(const Matrix& a);

}  // namespace gpdistill

#endif  // GPDISTILL_LINALG_HPP_
