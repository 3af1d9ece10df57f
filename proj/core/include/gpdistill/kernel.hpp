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

#ifndef GPDISTILL_KERNEL_HPP_
#define GPDISTILL_KERNEL_HPP_

#include <string>
#include <vector>

#include "gpdistill/linalg.hpp"

namespace gpdistill {

enum class KernelFamily { kRbf, kArd };

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);

// Unit-amplitude squared-exponential kernel. RBF carries one lengthscale,
// ARD one per input dimension. noise_variance is the Gaussian likelihood
// variance added on the diagonal of training covariances.
struct KernelSpec {
  KernelFamily family = KernelFamily::kRbf;
  std::vector<double> lengthscales{1.0};
  double noise_variance = 1e-2;

  static KernelSpec rbf(double lengthscale, double noise_variance);
  static KernelSpec ard(std::vector<double> lengthscales, double noise_variance);

  // Throws ContractViolation if any value is non-positive or non-finite.
  void validate() const;
  // Throws ContractViolation if the spec cannot evaluate d-dimensional input.
  void check_dimension(Index d) const;

  // Number of log-hyperparameters: lengthscales then log noise.
  Index num_params() const { return static_cast<Index>(lengthscales.size()) + 1; }
  Vector log_params() const;
  static KernelSpec from_log_params(KernelFamily family, const Vector& log_params);

  bool operator==(const KernelSpec&) const = default;
};

// k(x, z) = exp(-0.5 * sum_i (x_i - z_i)^2 / l_i^2). Exactly symmetric.
double eval_kernel(const KernelSpec& spec, const Eigen::Ref<const Vector>& x,
                   const Eigen::Ref<const Vector>& z);

// Rows of a and b are points. Entry (i, j) = k(a_i, b_j); every entry is
// accumulated sequentially over dimensions, so results do not depend on how
// the rows are scheduled.
Matrix kernel_matrix(const KernelSpec& spec, const Matrix& a, const Matrix& b);

// Symmetric K(a, a) with unit diagonal.
Matrix kernel_matrix(const KernelSpec& spec, const Matrix& a);

// Row vector k(x, B) as a column vector.
Vector kernel_vector(const KernelSpec& spec, const Eigen::Ref<const Vector>& x,
                     const Matrix& b);

}  // namespace gpdistill

#endif  // GPDISTILL_KERNEL_HPP_
