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

#include "gpdistill/sparse_weights.hpp"

#include <algorithm>
#include <string>

#include "gpdistill/error.hpp"

namespace gpdistill {

SparseWeights::SparseWeights(Index cols, const std::vector<std::vector<Index>>& supports)
    : cols_(cols) {
  detail::require(cols >= 1, "SparseWeights: need at least one column");
  offsets_.reserve(supports.size() + 1);
  for (const auto& row : supports) {
    std::vector<Index> sorted = row;
    std::sort(sorted.begin(), sorted.end());
    detail::require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
                    "SparseWeights: duplicate support id");
    for (Index id : sorted) {
      detail::require(id >= 0 && id < cols, "SparseWeights: support id out of range");
      columns_.push_back(id);
    }
    offsets_.push_back(static_cast<Index>(columns_.size()));
  }
  values_.assign(columns_.size(), 0.0);
}

SparseWeights SparseWeights::identity(Index n) {
  std::vector<std::vector<Index>> supports(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) supports[static_cast<std::size_t>(i)] = {i};
  SparseWeights w(n, supports);
  std::fill(w.values_.begin(), w.values_.end(), 1.0);
  return w;
}

Index SparseWeights::max_row_support() const {
  Index best = 0;
  for (std::size_t i = 0; i + 1 < offsets_.size(); ++i) {
    best = std::max(best, offsets_[i + 1] - offsets_[i]);
  }
  return best;
}

std::span<const Index> SparseWeights::support(Index row) const {
  const auto r = static_cast<std::size_t>(row);
  return {columns_.data() + offsets_[r], static_cast<std::size_t>(offsets_[r + 1] - offsets_[r])};
}

std::span<const double> SparseWeights::values(Index row) const {
  const auto r = static_cast<std::size_t>(row);
  return {values_.data() + offsets_[r], static_cast<std::size_t>(offsets_[r + 1] - offsets_[r])};
}

std::span<double> SparseWeights::values(Index row) {
  const auto r = static_cast<std::size_t>(row);
  return {values_.data() + offsets_[r], static_cast<std::size_t>(offsets_[r + 1] - offsets_[r])};
}

bool SparseWeights::same_support(const SparseWeights& other) const {
  return cols_ == other.cols_ && offsets_ == other.offsets_ && columns_ == other.columns_;
}

void SparseWeights::check(Index b) const {
  for (Index i = 0; i < rows(); ++i) {
    const auto s = support(i);
    if (static_cast<Index>(s.size()) > b) {
      throw ContractViolation("SparseWeights: row " + std::to_string(i) + " has " +
                              std::to_string(s.size()) + " entries, limit " +
                              std::to_string(b));
    }
    for (std::size_t k = 0; k < s.size(); ++k) {
      detail::require(s[k] >= 0 && s[k] < cols_, "SparseWeights: support id out of range");
      detail::require(k == 0 || s[k - 1] < s[k], "SparseWeights: support not strictly sorted");
    }
  }
  detail::require(values_.size() == columns_.size(), "SparseWeights: value count mismatch");
}

Matrix SparseWeights::to_dense() const {
  Matrix out = Matrix::Zero(rows(), cols_);
  for (Index i = 0; i < rows(); ++i) {
    const auto s = support(i);
    const auto v = values(i);
    for (std::size_t k = 0; k < s.size(); ++k) out(i, s[k]) = v[k];
  }
  return out;
}

Matrix SparseWeights::times(const Matrix& k) const {
  detail::require(k.rows() == cols_, "SparseWeights::times: shape mismatch");
  // Accumulate W K^T-style through the transpose so every update is a
  // contiguous column.
  const Matrix kt = k.transpose();
  Matrix out_t = Matrix::Zero(k.cols(), rows());
  for (Index i = 0; i < rows(); ++i) {
    const auto s = support(i);
    const auto v = values(i);
    for (std::size_t c = 0; c < s.size(); ++c) out_t.col(i) += v[c] * kt.col(s[c]);
  }
  return out_t.transpose();
}

Vector SparseWeights::transpose_times(const Vector& v) const {
  detail::require(v.size() == rows(), "SparseWeights::transpose_times: shape mismatch");
  Vector out = Vector::Zero(cols_);
  for (Index i = 0; i < rows(); ++i) {
    const auto s = support(i);
    const auto w = values(i);
    for (std::size_t c = 0; c < s.size(); ++c) out(s[c]) += w[c] * v(i);
  }
  return out;
}

SparseWeights SparseWeights::with_values_from(const Matrix& dense) const {
  detail::require(dense.rows() == rows() && dense.cols() == cols_,
                  "SparseWeights::with_values_from: shape mismatch");
  SparseWeights out = *this;
  for (Index i = 0; i < rows(); ++i) {
    const auto s = support(i);
    auto v = out.values(i);
    for (std::size_t c = 0; c < s.size(); ++c) v[c] = dense(i, s[c]);
  }
  return out;
}

void SparseWeights::axpy(double scale, const SparseWeights& other) {
  detail::require(same_support(other), "SparseWeights::axpy: support mismatch");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += scale * other.values_[k];
}

}  // namespace gpdistill
