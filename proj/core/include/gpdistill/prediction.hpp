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

#ifndef GPDISTILL_PREDICTION_HPP_
#define GPDISTILL_PREDICTION_HPP_

#include "gpdistill/linalg.hpp"

namespace gpdistill {

// Latent predictive mean and variance for a batch of query points, in
// standardized units. Negative variances from round-off are clamped to 0
// and counted.
struct Prediction {
  Vector mean;
  Vector variance;
  Index clamped = 0;
};

namespace detail {

// Clamps v at 0 in place, returns how many entries were negative.
inline Index clamp_variances(Vector& v) {
  Index count = 0;
  for (Index i = 0; i < v.size(); ++i) {
    if (v(i) < 0.0) {
      v(i) = 0.0;
      ++count;
    }
  }
  return count;
}

}  // namespace detail
}  // namespace gpdistill

#endif  // GPDISTILL_PREDICTION_HPP_
