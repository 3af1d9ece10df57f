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

#include "gpdistill/fast_inference.hpp"

#include <algorithm>
#include <cmath>

#include "gpdistill/error.hpp"

namespace gpdistill {

Precomputed precompute(const Dataset& data, const SparseWeights& w, const Matrix& k_uu,
                       double noise_variance) {
  detail::require(w.rows() == data.size(), "precompute: W rows must match training size");
  detail::require(k_uu.rows() == w.cols() && k_uu.cols() == w.cols(),
                  "precompute: K_UU shape must match W columns");
  detail::require(noise_variance > 0.0, "precompute: noise variance must be positive");

  const Matrix p = w.times(k_uu);                       // n x m, approximates K_XU
  Matrix system = symmetrized(w.times(Matrix(p.transpose())));  // W K_UU W^T
  system.diagonal().array() += noise_variance;

  JitteredCholesky chol = cholesky_with_jitter(system);
  const Matrix z = chol.factor.solve_lower(p);          // L^{-1} P
  const Vector t = chol.factor.solve_lower(data.y);

  Precomputed out;
  out.alpha_tilde = z.transpose() * t;
  out.v = symmetrized(z.transpose() * z);
  out.jitter = chol.jitter;
  return out;
}

TestWeights solve_test_weights(const DistilledModel& model,
                               const Eigen::Ref<const Vector>& query) {
  const Index m = model.inducing.size();
  detail::require(query.size() == model.inducing.dim(),
                  "solve_test_weights: query dimension mismatch");
  TestWeights out;
  out.neighbors = knn(model.inducing, query, model.b);
  out.support = out.neighbors.sorted_indices();
  const auto b = static_cast<Index>(out.support.size());
  const Matrix& u = model.inducing.points();

  if (model.system == TestWeightSystem::kSquare) {
    Matrix a(b, b);
    Vector rhs(b);
    for (Index r = 0; r < b; ++r) {
      const Index jr = out.support[static_cast<std::size_t>(r)];
      rhs(r) = eval_kernel(model.spec, query, u.row(jr).transpose());
      for (Index c = 0; c < b; ++c) a(r, c) = model.k_uu(jr, out.support[static_cast<std::size_t>(c)]);
    }
    out.values = least_squares(a, rhs);
  } else {
    Matrix a(m, b);
    for (Index c = 0; c < b; ++c) a.col(c) = model.k_uu.col(out.support[static_cast<std::size_t>(c)]);
    out.values = least_squares(a, kernel_vector(model.spec, query, u));
  }
  return out;
}

PredictionResult predict_point(const DistilledModel& model,
                               const Eigen::Ref<const Vector>& query) {
  TestWeights tw = solve_test_weights(model, query);
  const auto b = static_cast<Index>(tw.support.size());

  double mean = 0.0;
  double quad = 0.0;
  for (Index r = 0; r < b; ++r) {
    const Index jr = tw.support[static_cast<std::size_t>(r)];
    mean += tw.values(r) * model.alpha_tilde(jr);
    double row = 0.0;
    for (Index c = 0; c < b; ++c) {
      row += model.v(jr, tw.support[static_cast<std::size_t>(c)]) * tw.values(c);
    }
    quad += tw.values(r) * row;
  }

  PredictionResult out;
  out.mean = mean;
  const double raw = 1.0 - quad;  // unit-amplitude kernel: k(x, x) = 1
  out.clamped = raw < 0.0;
  out.variance = std::max(raw, 0.0);
  out.support_used = std::move(tw.neighbors);
  return out;
}

std::vector<PredictionResult> predict_batch(const DistilledModel& model,
                                            const Matrix& queries) {
  std::vector<PredictionResult> out;
  out.reserve(static_cast<std::size_t>(queries.rows()));
  for (Index i = 0; i < queries.rows(); ++i) {
    out.push_back(predict_point(model, queries.row(i).transpose()));
  }
  return out;
}

}  // namespace gpdistill
