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

#ifndef GPDISTILL_METRICS_HPP_
#define GPDISTILL_METRICS_HPP_

#include "gpdistill/linalg.hpp"

namespace gpdistill {

// Mean squared error over the population variance of y_true. Throws
// NumericalError when y_true is constant.
double smse(const Vector& y_true, const Vector& y_pred);

// sqrt(mean((v_exact - v_approx)^2)).
double variance_rmse(const Vector& v_exact, const Vector& v_approx);

double rmse(const Vector& a, const Vector& b);

// Entry-wise |A - B| summary used in reconstruction reports.
struct AbsErrorSummary {
  double max = 0.0;
  double mean = 0.0;
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
};

AbsErrorSummary abs_error_summary(const Matrix& a, const Matrix& b);

}  // namespace gpdistill

#endif  // GPDISTILL_METRICS_HPP_
