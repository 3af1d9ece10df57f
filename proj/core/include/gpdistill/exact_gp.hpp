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

#ifndef GPDISTILL_EXACT_GP_HPP_
#define GPDISTILL_EXACT_GP_HPP_

#include <vector>

#include "gpdistill/dataset.hpp"
#include "gpdistill/kernel.hpp"
#include "gpdistill/linalg.hpp"
#include "gpdistill/prediction.hpp"

namespace gpdistill {

// Dense Cholesky is refused above this many training points.
inline constexpr Index kMaxDenseTrainingPoints = 20000;
// Noise variance never goes below this during training.
inline constexpr double kNoiseFloor = 1e-8;

// Zero-mean exact GP posterior: data, hyperparameters, the Cholesky factor of
// K_XX + noise * I, and alpha = (K_XX + noise * I)^{-1} y.
class ExactGPModel {
 public:
  ExactGPModel() = default;

  // Factorizes the training covariance. Throws FactorizationError if the
  // noise is too small for the data.
  ExactGPModel(Dataset data, KernelSpec spec);
  // Rebuilds from a stored factor (no refactorization).
  ExactGPModel(Dataset data, KernelSpec spec, Cholesky chol);

  const Dataset& data() const { return data_; }
  const KernelSpec& spec() const { return spec_; }
  const Cholesky& chol() const { return chol_; }
  const Vector& alpha() const { return alpha_; }

 private:
  Dataset data_;
  KernelSpec spec_;
  Cholesky chol_;
  Vector alpha_;
};

struct LogMarginalLikelihood {
  double value = 0.0;
  // d value / d log-hyperparameter, ordered as KernelSpec::log_params().
  Vector gradient;
};

// log p(y | X, spec) = -1/2 y^T alpha - sum log L_ii - n/2 log(2 pi), with
// its gradient w.r.t. log-lengthscales and log-noise via the trace identity.
LogMarginalLikelihood log_marginal_likelihood(const Dataset& data,
                                              const KernelSpec& spec);

struct TrainingTrace {
  std::vector<double> lml;  // per accepted step, starting with the init
  int halvings = 0;
};

// Gradient ascent on the log marginal likelihood in log-hyperparameter space
// with Adam-style per-coordinate steps. Returns the best iterate seen, so
// the result never has a lower likelihood than init. steps = 0 returns init.
ExactGPModel train_exact(const Dataset& data, const KernelSpec& init, int steps,
                         double learning_rate, TrainingTrace* trace = nullptr);

// Posterior mean K_*X alpha and latent variance k(x*, x*) - k_*X K^{-1} k_X*.
Prediction predict_exact(const ExactGPModel& model, const Matrix& queries);

}  // namespace gpdistill

#endif  // GPDISTILL_EXACT_GP_HPP_
