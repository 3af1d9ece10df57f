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

#ifndef GPDISTILL_BASELINES_HPP_
#define GPDISTILL_BASELINES_HPP_

#include <vector>

#include "gpdistill/dataset.hpp"
#include "gpdistill/kernel.hpp"
#include "gpdistill/linalg.hpp"
#include "gpdistill/prediction.hpp"
#include "gpdistill/spatial_index.hpp"

namespace gpdistill {

enum class InducingVariant { kSoR, kFitc };

// Subset-of-regressors / FITC posterior over a fixed inducing set.
//
// With L L^T = K_UU (+ jitter) and Lambda the training noise (sigma^2 I for
// SoR, sigma^2 I + diag(K_XX - Q_XX) for FITC), the cached quantities are
//   A  = L^{-1} K_UX Lambda^{-1/2},   B = I + A A^T = L_B L_B^T,
//   c  = L^{-T} B^{-1} L^{-1} K_UX Lambda^{-1} y,
// so the mean is K_*U c (O(m)) and the variance needs two m x m triangular
// solves (O(m^2)).
struct SorFitcModel {
  InducingVariant variant = InducingVariant::kSoR;
  KernelSpec spec;
  InducingSet inducing;
  Matrix k_uu;
  Matrix k_xu;
  Cholesky k_uu_chol;
  double jitter = 0.0;
  Cholesky b_chol;
  Vector mean_weights;      // c
  Vector diag_correction;   // FITC only: k(x_i,x_i) - Q_ii, clamped at 0
};

// Throws FactorizationError when K_UU stays singular past 1e-4 relative
// jitter.
SorFitcModel fit_sor_fitc(const Dataset& data, const KernelSpec& spec,
                          const InducingSet& inducing, InducingVariant variant);

Prediction predict_sor_fitc(const SorFitcModel& model, const Matrix& queries);

// Implied noise-free training covariance: Q_XX = K_XU K_UU^{-1} K_UX, plus the
// diagonal correction for FITC.
Matrix implied_kernel(const SorFitcModel& model);

// Q_XX for an arbitrary point set, with the shared jitter policy on K_UU.
Matrix sor_kernel_approximation(const KernelSpec& spec, const Matrix& x,
                                const InducingSet& inducing);

// Regular 1-D grid of `size` nodes.
struct Grid1d {
  double start = 0.0;
  double spacing = 1.0;
  Index size = 0;

  // Nodes from min(x) - 2h to max(x) + 2h.
  static Grid1d covering(const Vector& x, Index size);
  Vector nodes() const;
};

// Row-sparse interpolation weights (up to 4 per row).
struct InterpolationRow {
  std::vector<Index> columns;
  std::vector<double> weights;
};

// Keys cubic convolution weights (a = -0.5) onto the four nodes bracketing
// each point. Nodes that fall off the grid are dropped, so points outside
// the grid get fewer (or no) weights.
std::vector<InterpolationRow> cubic_interpolation_weights(const Vector& x,
                                                          const Grid1d& grid);
double keys_cubic(double s);

// Dense W for small problems and reconstruction experiments.
Matrix interpolation_matrix(const std::vector<InterpolationRow>& rows, Index grid_size);

// 1-D structured kernel interpolation with dense algebra: the exact GP
// formulas evaluated with K~ = W K_GG W^T. Precomputes
//   grid_mean = K_GG W^T (K~ + s^2 I)^{-1} y              (m)
//   grid_cov  = K_GG - K_GG W^T (K~ + s^2 I)^{-1} W K_GG  (m x m)
// so a query with weights w costs O(1): mean w . grid_mean and variance
// w grid_cov w^T.
struct Kiss1dModel {
  KernelSpec spec;
  Grid1d grid;
  std::vector<InterpolationRow> w_train;
  Matrix k_gg;
  Cholesky train_chol;  // of W K_GG W^T + s^2 I
  Vector grid_mean;
  Matrix grid_cov;
};

Kiss1dModel fit_kiss1d(const Dataset& data, const KernelSpec& spec, Index grid_size);

Prediction predict_kiss1d(const Kiss1dModel& model, const Matrix& queries);

// W K_GG W^T for the points x (reconstruction experiments).
Matrix kiss_kernel_approximation(const KernelSpec& spec, const Vector& x,
                                 const Grid1d& grid);

}  // namespace gpdistill

#endif  // GPDISTILL_BASELINES_HPP_
