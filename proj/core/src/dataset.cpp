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

#include "gpdistill/dataset.hpp"

#include <cmath>

#include "gpdistill/error.hpp"

namespace gpdistill {

Standardization Standardization::identity(Index d) {
  return {Vector::Zero(d), Vector::Ones(d), 0.0, 1.0};
}

Standardization Standardization::fit(const Matrix& x, const Vector& y,
                                     std::vector<Index>* constant_columns) {
  detail::require(x.rows() == y.size() && x.rows() >= 1,
                  "Standardization::fit: shape mismatch");
  Standardization s;
  const double n = static_cast<double>(x.rows());
  s.feature_means = x.colwise().mean().transpose();
  s.feature_sds.resize(x.cols());
  for (Index k = 0; k < x.cols(); ++k) {
    const double var = (x.col(k).array() - s.feature_means(k)).square().sum() / n;
    double sd = std::sqrt(var);
    if (!(sd > 0.0)) {
      sd = 1.0;
      if (constant_columns) constant_columns->push_back(k);
    }
    s.feature_sds(k) = sd;
  }
  s.target_mean = y.mean();
  s.target_sd = std::sqrt((y.array() - s.target_mean).square().sum() / n);
  return s;
}

Matrix Standardization::transform_features(const Matrix& x) const {
  detail::require(x.cols() == feature_means.size(), "transform_features: dimension mismatch");
  Matrix out = x.rowwise() - feature_means.transpose();
  return out.array().rowwise() / feature_sds.transpose().array();
}

Vector Standardization::transform_features(const Vector& x) const {
  detail::require(x.size() == feature_means.size(), "transform_features: dimension mismatch");
  return (x - feature_means).cwiseQuotient(feature_sds);
}

Vector Standardization::transform_target(const Vector& y) const {
  return (y.array() - target_mean) / target_sd;
}

Vector Standardization::inverse_target(const Vector& y) const {
  return (y.array() * target_sd + target_mean).matrix();
}

Vector Standardization::inverse_variance(const Vector& v) const {
  return v * (target_sd * target_sd);
}

bool Standardization::operator==(const Standardization& other) const {
  return feature_means == other.feature_means && feature_sds == other.feature_sds &&
         target_mean == other.target_mean && target_sd == other.target_sd;
}

Dataset Dataset::from_standardized(Matrix x, Vector y) {
  Dataset data;
  data.scaling = Standardization::identity(x.cols());
  data.x = std::move(x);
  data.y = std::move(y);
  data.validate();
  return data;
}

void Dataset::validate() const {
  detail::require(x.rows() >= 2, "Dataset: need at least 2 points");
  detail::require(x.cols() >= 1, "Dataset: need at least 1 feature");
  detail::require(y.size() == x.rows(), "Dataset: target length does not match rows");
  detail::require(x.allFinite() && y.allFinite(), "Dataset: non-finite entries");
  detail::require(scaling.feature_means.size() == x.cols() &&
                      scaling.feature_sds.size() == x.cols(),
                  "Dataset: standardization dimension mismatch");
  detail::require((scaling.feature_sds.array() > 0.0).all() && scaling.target_sd > 0.0,
                  "Dataset: standard deviations must be positive");
}

}  // namespace gpdistill
