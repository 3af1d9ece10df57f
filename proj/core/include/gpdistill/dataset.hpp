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

#ifndef GPDISTILL_DATASET_HPP_
#define GPDISTILL_DATASET_HPP_

#include <string>
#include <vector>

#include "gpdistill/linalg.hpp"

namespace gpdistill {

// Affine maps between raw and standardized units. Constant feature columns
// get sd = 1.
struct Standardization {
  Vector feature_means;
  Vector feature_sds;
  double target_mean = 0.0;
  double target_sd = 1.0;

  static Standardization identity(Index d);
  // Statistics of x and y (population sd). Names of constant columns are
  // appended to constant_columns when provided.
  static Standardization fit(const Matrix& x, const Vector& y,
                             std::vector<Index>* constant_columns = nullptr);

  Matrix transform_features(const Matrix& x) const;
  Vector transform_features(const Vector& x) const;
  Vector transform_target(const Vector& y) const;
  Vector inverse_target(const Vector& y) const;
  // Variances scale by target_sd^2.
  Vector inverse_variance(const Vector& v) const;

  bool operator==(const Standardization& other) const;
};

// Training or test data, stored in standardized units, together with the
// statistics needed to map back to raw units.
struct Dataset {
  Matrix x;  // n x d
  Vector y;  // n
  Standardization scaling;

  Index size() const { return x.rows(); }
  Index dim() const { return x.cols(); }

  // Wraps already-standardized (or unitless synthetic) data with an identity
  // scaling. Throws ContractViolation on n < 2, length mismatch, or
  // non-finite entries.
  static Dataset from_standardized(Matrix x, Vector y);
  // Checks the documented invariants.
  void validate() const;
};

}  // namespace gpdistill

#endif  // GPDISTILL_DATASET_HPP_
