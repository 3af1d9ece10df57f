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

#include "gpdistill/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gpdistill/error.hpp"

namespace gpdistill {

double smse(const Vector& y_true, const Vector& y_pred) {
  detail::require(y_true.size() == y_pred.size(), "smse: length mismatch");
  detail::require(y_true.size() >= 2, "smse: need at least two points");
  const double mean = y_true.mean();
  const double var = (y_true.array() - mean).square().mean();
  if (!(var > 0.0)) throw NumericalError("smse: targets have zero variance");
  return (y_true - y_pred).squaredNorm() / static_cast<double>(y_true.size()) / var;
}

double rmse(const Vector& a, const Vector& b) {
  detail::require(a.size() == b.size(), "rmse: length mismatch");
  detail::require(a.size() >= 1, "rmse: empty input");
  return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size()));
}

double variance_rmse(const Vector& v_exact, const Vector& v_approx) {
  return rmse(v_exact, v_approx);
}

AbsErrorSummary abs_error_summary(const Matrix& a, const Matrix& b) {
  detail::require(a.rows() == b.rows() && a.cols() == b.cols(),
                  "abs_error_summary: shape mismatch");
  detail::require(a.size() >= 1, "abs_error_summary: empty input");
  std::vector<double> err(static_cast<std::size_t>(a.size()));
  for (Index j = 0, k = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i, ++k) err[static_cast<std::size_t>(k)] = std::abs(a(i, j) - b(i, j));
  }
  std::sort(err.begin(), err.end());
  // Linear interpolation between order statistics.
  const auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(err.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, err.size() - 1);
    return err[lo] + (pos - static_cast<double>(lo)) * (err[hi] - err[lo]);
  };
  AbsErrorSummary s;
  s.max = err.back();
  double total = 0.0;
  for (double e : err) total += e;
  s.mean = total / static_cast<double>(err.size());
  s.q25 = quantile(0.25);
  s.median = quantile(0.5);
  s.q75 = quantile(0.75);
  return s;
}

}  // namespace gpdistill
