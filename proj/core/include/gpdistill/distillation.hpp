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

#ifndef GPDISTILL_DISTILLATION_HPP_
#define GPDISTILL_DISTILLATION_HPP_

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "gpdistill/exact_gp.hpp"
#include "gpdistill/fast_inference.hpp"
#include "gpdistill/kernel.hpp"
#include "gpdistill/linalg.hpp"
#include "gpdistill/sparse_weights.hpp"
#include "gpdistill/spatial_index.hpp"

namespace gpdistill {

enum class GradientMode {
  // E = W K_UU W^T - K_XX; E_ii <- 2 E_ii; grad = E^T W K_UU.
  kPaperAlg1,
  // Exact gradient of ||K_XX - W K_UU W^T||_F^2: 4 E W K_UU.
  kAnalyticFnorm,
};

struct DistillConfig {
  Index b = 10;
  Index m = 100;
  // Step size. Without line search the default is 1e-4 n / ||K_UU||_F; with
  // line search the same value seeds the first trial step.
  std::optional<double> eta;
  int iterations = 100;
  GradientMode gradient_mode = GradientMode::kAnalyticFnorm;
  bool line_search = true;
  // Evaluate the objective for the log even when iterations = 0. Turning this
  // off with iterations = 0 skips materializing K_XX.
  bool track_objective = true;
  TestWeightSystem test_system = TestWeightSystem::kSquare;

  void validate() const;
};

struct IterationRecord {
  int iteration = 0;       // 0 is the initialization
  double objective = 0.0;  // ||K_XX - W K_UU W^T||_F
  double step_size = 0.0;  // step taken (0 for the init record)
  int backtracks = 0;
};

// Row-wise initialization: J_i = b nearest inducing points of x_i, values
// the least-squares fit of W_i(J_i) K_UU(J_i, :) to (K_XU)_i.
SparseWeights init_weights(const Matrix& k_xu, const Matrix& k_uu,
                           const InducingSet& inducing, const Matrix& x, Index b);

// ||K_XX - W K_UU W^T||_F using sparse row products (W is never densified).
double objective(const Matrix& k_xx, const SparseWeights& w, const Matrix& k_uu);

// Dense n x m gradient before projection.
Matrix gradient(const Matrix& k_xx, const SparseWeights& w, const Matrix& k_uu,
                GradientMode mode);

// Keeps the entries of g on each row's support; everything else is zeroed.
SparseWeights project_rows(const Matrix& g, const SparseWeights& supports);

// project_rows(gradient(...)) computed directly on the supports in
// O(n^2 b) instead of O(n^2 m).
SparseWeights projected_gradient(const Matrix& k_xx, const SparseWeights& w,
                                 const Matrix& k_uu, GradientMode mode);

// Result of compressing a kernel matrix, independent of any targets.
struct KernelDistillation {
  SparseWeights weights;
  Matrix k_uu;
  std::vector<IterationRecord> log;

  double final_objective() const { return log.empty() ? 0.0 : log.back().objective; }
};

// Initialization followed by cfg.iterations of projected gradient descent on
// the fixed supports. Throws NumericalError if the objective turns
// non-finite.
KernelDistillation distill_kernel(const KernelSpec& spec, const Matrix& x,
                                  const InducingSet& inducing, const DistillConfig& cfg);

struct DistillResult {
  DistilledModel model;
  std::vector<IterationRecord> log;
};

// U <- kmeans(X, m, seed), then distill_with_inducing().
DistillResult distill(const ExactGPModel& teacher, const DistillConfig& cfg,
                      std::uint64_t seed);

// Distills the teacher's kernel onto a given inducing set and precomputes
// the fast-prediction state.
DistillResult distill_with_inducing(const ExactGPModel& teacher, const InducingSet& inducing,
                                    const DistillConfig& cfg);

// Final objective per b (cfg.b is overridden), sharing one inducing set.
std::vector<std::pair<Index, double>> error_vs_sparsity(const ExactGPModel& teacher,
                                                        const DistillConfig& cfg,
                                                        const std::vector<Index>& b_list,
                                                        std::uint64_t seed);

// Same sweep on a bare kernel matrix (no targets).
std::vector<std::pair<Index, double>> error_vs_sparsity(const KernelSpec& spec,
                                                        const Matrix& x,
                                                        const InducingSet& inducing,
                                                        const DistillConfig& cfg,
                                                        const std::vector<Index>& b_list);

}  // namespace gpdistill

#endif  // GPDISTILL_DISTILLATION_HPP_
