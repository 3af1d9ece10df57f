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

#ifndef GPDISTILL_FAST_INFERENCE_HPP_
#define GPDISTILL_FAST_INFERENCE_HPP_

#include <optional>
#include <vector>

#include "gpdistill/dataset.hpp"
#include "gpdistill/kernel.hpp"
#include "gpdistill/linalg.hpp"
#include "gpdistill/sparse_weights.hpp"
#include "gpdistill/spatial_index.hpp"

namespace gpdistill {

// How the test-time row W* is fitted on its b nearest inducing points J*.
enum class TestWeightSystem {
  // b x b system W*(J*) K_UU(J*, J*) = K_*U(J*); O(b^3).
  kSquare,
  // b x m least squares W*(J*) K_UU(J*, :) ~ K_*U; O(b^2 m).
  kRows,
};

// Student model. Everything except `weights` is part of the persisted
// inference bundle, whose size is Theta(m^2) and independent of n.
struct DistilledModel {
  InducingSet inducing;
  KernelSpec spec;
  Index b = 0;
  Matrix k_uu;
  Vector alpha_tilde;  // K_UU W^T (W K_UU W^T + s^2 I)^{-1} y
  Matrix v;            // K_UU W^T (W K_UU W^T + s^2 I)^{-1} W K_UU
  Standardization scaling;
  TestWeightSystem system = TestWeightSystem::kSquare;
  std::optional<SparseWeights> weights;  // training W; not persisted
};

struct Precomputed {
  Vector alpha_tilde;
  Matrix v;
  double jitter = 0.0;  // added to s^2 I if the plain factorization failed
};

// alpha~ and V from a dense Cholesky of W K_UU W^T + noise I (n x n).
// V is symmetrized after the solve.
Precomputed precompute(const Dataset& data, const SparseWeights& w, const Matrix& k_uu,
                       double noise_variance);

// Sparse test-time weights: support J* (ascending ids) and values.
struct TestWeights {
  NeighborList neighbors;
  std::vector<Index> support;
  Vector values;
};

TestWeights solve_test_weights(const DistilledModel& model,
                               const Eigen::Ref<const Vector>& query);

struct PredictionResult {
  double mean = 0.0;
  double variance = 0.0;  // clamped at 0
  NeighborList support_used;
  bool clamped = false;   // raw variance was negative
};

// mean = W*(J*) . alpha~(J*), variance = k(x*, x*) - W*(J*) V(J*, J*) W*(J*)^T.
PredictionResult predict_point(const DistilledModel& model,
                               const Eigen::Ref<const Vector>& query);

std::vector<PredictionResult> predict_batch(const DistilledModel& model,
                                            const Matrix& queries);

}  // namespace gpdistill

#endif  // GPDISTILL_FAST_INFERENCE_HPP_
