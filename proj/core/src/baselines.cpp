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

#include "gpdistill/baselines.hpp"

#include <cmath>
#include <string>

#include "gpdistill/error.hpp"

namespace gpdistill {

namespace {

// Kernel diagonal; unit amplitude means k(x, x) = 1.
constexpr double kPriorVariance = 1.0;

}  // namespace

SorFitcModel fit_sor_fitc(const Dataset& data, const KernelSpec& spec,
                          const InducingSet& inducing, InducingVariant variant) {
  detail::require(data.x.rows() == data.y.size(), "fit_sor_fitc: target length mismatch");
  detail::require(inducing.dim() == data.dim(), "fit_sor_fitc: inducing dimension mismatch");
  spec.check_dimension(data.dim());

  SorFitcModel model;
  model.variant = variant;
  model.spec = spec;
  model.inducing = inducing;
  model.k_uu = kernel_matrix(spec, inducing.points());
  model.k_xu = kernel_matrix(spec, data.x, inducing.points());

  JitteredCholesky jc = cholesky_with_jitter(model.k_uu);
  model.k_uu_chol = std::move(jc.factor);
  model.jitter = jc.jitter;

  const Index n = data.size();
  const Index m = inducing.size();
  Matrix a = model.k_uu_chol.solve_lower(Matrix(model.k_xu.transpose()));  // m x n

  Vector noise = Vector::Constant(n, spec.noise_variance);
  if (variant == InducingVariant::kFitc) {
    model.diag_correction = (Vector::Constant(n, kPriorVariance) -
                             a.colwise().squaredNorm().transpose())
                                .cwiseMax(0.0);
    noise += model.diag_correction;
  }
  const Vector inv_sqrt_noise = noise.cwiseSqrt().cwiseInverse();
  a = a * inv_sqrt_noise.asDiagonal();

  Matrix b = Matrix::Identity(m, m);
  b.selfadjointView<Eigen::Lower>().rankUpdate(a);
  b = b.selfadjointView<Eigen::Lower>();
  model.b_chol = Cholesky(b);

  const Vector scaled_y = data.y.cwiseProduct(inv_sqrt_noise);
  const Vector rhs = a * scaled_y;
  const Vector inner = model.b_chol.solve(rhs);
  model.mean_weights =
      model.k_uu_chol.lower().transpose().triangularView<Eigen::Upper>().solve(inner);
  return model;
}

Prediction predict_sor_fitc(const SorFitcModel& model, const Matrix& queries) {
  detail::require(queries.cols() == model.inducing.dim(),
                  "predict_sor_fitc: dimension mismatch");
  const Matrix ksu = kernel_matrix(model.spec, queries, model.inducing.points());  // p x m
  Prediction out;
  out.mean = ksu * model.mean_weights;
  const Matrix v = model.k_uu_chol.solve_lower(Matrix(ksu.transpose()));  // m x p
  const Matrix w = model.b_chol.solve_lower(v);
  out.variance = w.colwise().squaredNorm().transpose();
  if (model.variant == InducingVariant::kFitc) {
    out.variance.array() += kPriorVariance - v.colwise().squaredNorm().transpose().array();
  }
  out.clamped = detail::clamp_variances(out.variance);
  return out;
}

Matrix implied_kernel(const SorFitcModel& model) {
  const Matrix a = model.k_uu_chol.solve_lower(Matrix(model.k_xu.transpose()));
  Matrix q = a.transpose() * a;
  if (model.variant == InducingVariant::kFitc) {
    q.diagonal() += model.diag_correction;
  }
  return q;
}

Matrix sor_kernel_approximation(const KernelSpec& spec, const Matrix& x,
                                const InducingSet& inducing) {
  detail::require(x.cols() == inducing.dim(), "sor_kernel_approximation: dimension mismatch");
  const Matrix k_uu = kernel_matrix(spec, inducing.points());
  const JitteredCholesky jc = cholesky_with_jitter(k_uu);
  const Matrix a = jc.factor.solve_lower(Matrix(kernel_matrix(spec, inducing.points(), x)));
  Matrix q(x.rows(), x.rows());
  q.setZero();
  q.selfadjointView<Eigen::Lower>().rankUpdate(a.transpose());
  return q.selfadjointView<Eigen::Lower>();
}

Grid1d Grid1d::covering(const Vector& x, Index size) {
  detail::require(size >= 4, "KISS grid needs at least 4 nodes, got " + std::to_string(size));
  detail::require(x.size() >= 1, "KISS grid: no points");
  const double lo = x.minCoeff();
  const double hi = x.maxCoeff();
  Grid1d grid;
  grid.size = size;
  if (hi <= lo) {
    grid.spacing = 1.0;
    grid.start = lo - 0.5 * static_cast<double>(size - 1);
  } else if (size <= 5) {
    // Too few nodes for the two-node margin on each side.
    grid.spacing = (hi - lo) / static_cast<double>(size - 1);
    grid.start = lo;
  } else {
    grid.spacing = (hi - lo) / static_cast<double>(size - 5);
    grid.start = lo - 2.0 * grid.spacing;
  }
  return grid;
}

Vector Grid1d::nodes() const {
  Vector out(size);
  for (Index i = 0; i < size; ++i) out(i) = start + spacing * static_cast<double>(i);
  return out;
}

double keys_cubic(double s) {
  constexpr double a = -0.5;
  s = std::abs(s);
  if (s <= 1.0) return ((a + 2.0) * s - (a + 3.0)) * s * s + 1.0;
  if (s < 2.0) return ((a * s - 5.0 * a) * s + 8.0 * a) * s - 4.0 * a;
  return 0.0;
}

std::vector<InterpolationRow> cubic_interpolation_weights(const Vector& x,
                                                          const Grid1d& grid) {
  std::vector<InterpolationRow> rows(static_cast<std::size_t>(x.size()));
  for (Index i = 0; i < x.size(); ++i) {
    const double t = (x(i) - grid.start) / grid.spacing;
    const double base = std::floor(t);
    if (!std::isfinite(base) || base < -3.0 || base > static_cast<double>(grid.size) + 2.0) {
      continue;  // far outside the grid
    }
    const auto j = static_cast<Index>(base);
    auto& row = rows[static_cast<std::size_t>(i)];
    for (Index node = j - 1; node <= j + 2; ++node) {
      if (node < 0 || node >= grid.size) continue;
      const double w = keys_cubic(t - static_cast<double>(node));
      if (w == 0.0) continue;
      row.columns.push_back(node);
      row.weights.push_back(w);
    }
  }
  return rows;
}

Matrix interpolation_matrix(const std::vector<InterpolationRow>& rows, Index grid_size) {
  Matrix w = Matrix::Zero(static_cast<Index>(rows.size()), grid_size);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < rows[i].columns.size(); ++k) {
      w(static_cast<Index>(i), rows[i].columns[k]) = rows[i].weights[k];
    }
  }
  return w;
}

namespace {

// W K (n x m) from sparse interpolation rows.
Matrix rows_times(const std::vector<InterpolationRow>& rows, const Matrix& k) {
  Matrix out = Matrix::Zero(static_cast<Index>(rows.size()), k.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < rows[i].columns.size(); ++c) {
      out.row(static_cast<Index>(i)) += rows[i].weights[c] * k.row(rows[i].columns[c]);
    }
  }
  return out;
}

// (W K) W^T, exploiting the sparsity of W.
Matrix times_rows_transposed(const Matrix& wk, const std::vector<InterpolationRow>& rows) {
  Matrix out = Matrix::Zero(wk.rows(), static_cast<Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (std::size_t c = 0; c < rows[j].columns.size(); ++c) {
      out.col(static_cast<Index>(j)) += rows[j].weights[c] * wk.col(rows[j].columns[c]);
    }
  }
  return out;
}

}  // namespace

Matrix kiss_kernel_approximation(const KernelSpec& spec, const Vector& x,
                                 const Grid1d& grid) {
  spec.check_dimension(1);
  const auto rows = cubic_interpolation_weights(x, grid);
  const Matrix nodes = grid.nodes();
  const Matrix k_gg = kernel_matrix(spec, nodes);
  return times_rows_transposed(rows_times(rows, k_gg), rows);
}

Kiss1dModel fit_kiss1d(const Dataset& data, const KernelSpec& spec, Index grid_size) {
  detail::require(data.dim() == 1, "fit_kiss1d: KISS-GP is only supported for d = 1");
  detail::require(grid_size >= 4, "fit_kiss1d: grid size must be >= 4");
  detail::require(data.x.rows() == data.y.size(), "fit_kiss1d: target length mismatch");
  spec.check_dimension(1);

  Kiss1dModel model;
  model.spec = spec;
  model.grid = Grid1d::covering(data.x.col(0), grid_size);
  model.w_train = cubic_interpolation_weights(data.x.col(0), model.grid);
  const Matrix nodes = model.grid.nodes();
  model.k_gg = kernel_matrix(spec, nodes);

  const Matrix p = rows_times(model.w_train, model.k_gg);  // W K_GG, n x m
  Matrix k_tilde = times_rows_transposed(p, model.w_train);
  k_tilde = symmetrized(k_tilde);
  k_tilde.diagonal().array() += spec.noise_variance;
  model.train_chol = Cholesky(k_tilde);

  const Vector alpha = model.train_chol.solve(data.y);
  model.grid_mean = p.transpose() * alpha;
  const Matrix z = model.train_chol.solve_lower(p);  // n x m
  Matrix cov = model.k_gg;
  cov.selfadjointView<Eigen::Lower>().rankUpdate(z.transpose(), -1.0);
  model.grid_cov = cov.selfadjointView<Eigen::Lower>();
  return model;
}

Prediction predict_kiss1d(const Kiss1dModel& model, const Matrix& queries) {
  detail::require(queries.cols() == 1, "predict_kiss1d: queries must be 1-D");
  const auto rows = cubic_interpolation_weights(queries.col(0), model.grid);
  Prediction out;
  out.mean.resize(queries.rows());
  out.variance.resize(queries.rows());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    double mean = 0.0;
    double var = 0.0;
    for (std::size_t a = 0; a < r.columns.size(); ++a) {
      mean += r.weights[a] * model.grid_mean(r.columns[a]);
      for (std::size_t b = 0; b < r.columns.size(); ++b) {
        var += r.weights[a] * r.weights[b] * model.grid_cov(r.columns[a], r.columns[b]);
      }
    }
    out.mean(static_cast<Index>(i)) = mean;
    out.variance(static_cast<Index>(i)) = var;
  }
  out.clamped = detail::clamp_variances(out.variance);
  return out;
}

}  // namespace gpdistill
