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

#ifndef GPDISTILL_SPARSE_WEIGHTS_HPP_
#define GPDISTILL_SPARSE_WEIGHTS_HPP_

#include <span>
#include <vector>

#include "gpdistill/linalg.hpp"

namespace gpdistill {

// Row-sparse n x m matrix with a fixed support per row. Supports are sorted
// ascending, distinct and < m; they never change after construction, only
// the values do.
class SparseWeights {
 public:
  SparseWeights() = default;

  // All values start at zero. Each support is sorted; throws
  // ContractViolation on out-of-range or duplicate ids.
  SparseWeights(Index cols, const std::vector<std::vector<Index>>& supports);

  // n x n identity (one entry per row).
  static SparseWeights identity(Index n);

  Index rows() const { return static_cast<Index>(offsets_.size()) - 1; }
  Index cols() const { return cols_; }
  Index nonzeros() const { return static_cast<Index>(columns_.size()); }
  Index max_row_support() const;

  std::span<const Index> support(Index row) const;
  std::span<const double> values(Index row) const;
  std::span<double> values(Index row);
  const std::vector<double>& all_values() const { return values_; }
  std::vector<double>& all_values() { return values_; }

  bool same_support(const SparseWeights& other) const;

  // Throws ContractViolation if any row has more than b entries or the
  // structural invariants are broken.
  void check(Index b) const;

  Matrix to_dense() const;
  // W * K for a dense m x p matrix K.
  Matrix times(const Matrix& k) const;
  // W^T * v.
  Vector transpose_times(const Vector& v) const;
  // Sparse copy keeping this support and taking values from a dense n x m
  // matrix; entries off the support are dropped.
  SparseWeights with_values_from(const Matrix& dense) const;

  // values <- values + scale * other.values (same support required).
  void axpy(double scale, const SparseWeights& other);

 private:
  Index cols_ = 0;
  std::vector<Index> offsets_{0};
  std::vector<Index> columns_;
  std::vector<double> values_;
};

}  // namespace gpdistill

#endif  // GPDISTILL_SPARSE_WEIGHTS_HPP_
