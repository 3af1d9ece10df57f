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

#include "gpdistill/kernel.hpp"

#include <cmath>

#include "gpdistill/error.hpp"

namespace gpdistill {

std::string to_string(KernelFamily family) {
  return family == KernelFamily::kRbf ? "rbf" : "ard";
}

KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "rbf" || name == "RBF") return KernelFamily::kRbf;
  if (name == "ard" || name == "ARD") return KernelFamily::kArd;
  throw ContractViolation("unknown kernel family '" + name + "'");
}

KernelSpec KernelSpec::rbf(double lengthscale, double noise_variance) {
  KernelSpec spec{KernelFamily::kRbf, {lengthscale}, noise_variance};
  spec.validate();
  return spec;
}

KernelSpec KernelSpec::ard(std::vector<double> lengthscales, double noise_variance) {
  KernelSpec spec{KernelFamily::kArd, std::move(lengthscales), noise_variance};
  spec.validate();
  return spec;
}

void KernelSpec::validate() const {
  detail::require(!lengthscales.empty(), "KernelSpec: no lengthscales");
  detail::require(family == KernelFamily::kArd || lengthscales.size() == 1,
                  "KernelSpec: RBF takes exactly one lengthscale");
  for (double l : lengthscales) {
    detail::require(std::isfinite(l) && l > 0.0,
                    "KernelSpec: lengthscales must be finite and > 0");
  }
  detail::require(std::isfinite(noise_variance) && noise_variance > 0.0,
                  "KernelSpec: noise variance must be finite and > 0");
}

void KernelSpec::check_dimension(Index d) const {
  validate();
  if (family == KernelFamily::kArd) {
    detail::require(static_cast<Index>(lengthscales.size()) == d,
                    "ARD kernel: lengthscale count " +
                        std::to_string(lengthscales.size()) +
                        " does not match input dimension " + std::to_string(d));
  }
}

Vector KernelSpec::log_params() const {
  Vector p(num_params());
  for (std::size_t i = 0; i < lengthscales.size(); ++i) {
    p(static_cast<Index>(i)) = std::log(lengthscales[i]);
  }
  p(num_params() - 1) = std::log(noise_variance);
  return p;
}

KernelSpec KernelSpec::from_log_params(KernelFamily family, const Vector& log_params) {
  detail::require(log_params.size() >= 2, "KernelSpec: need >= 2 log params");
  KernelSpec spec;
  spec.family = family;
  spec.lengthscales.resize(static_cast<std::size_t>(log_params.size() - 1));
  for (std::size_t i = 0; i < spec.lengthscales.size(); ++i) {
    spec.lengthscales[i] = std::exp(log_params(static_cast<Index>(i)));
  }
  spec.noise_variance = std::exp(log_params(log_params.size() - 1));
  return spec;
}

namespace {

// Inverse squared lengthscale per dimension.
Vector inverse_sq_lengthscales(const KernelSpec& spec, Index d) {
  Vector inv(d);
  for (Index k = 0; k < d; ++k) {
    const double l = spec.family == KernelFamily::kRbf
                         ? spec.lengthscales.front()
                         : spec.lengthscales[static_cast<std::size_t>(k)];
    inv(k) = 1.0 / (l * l);
  }
  return inv;
}

inline double scaled_sq_dist(const double* x, const double* z, const double* inv,
                             Index d) {
  double acc = 0.0;
  for (Index k = 0; k < d; ++k) {
    const double diff = x[k] - z[k];
    acc += diff * diff * inv[k];
  }
  return acc;
}

}  // namespace

double eval_kernel(const KernelSpec& spec, const Eigen::Ref<const Vector>& x,
                   const Eigen::Ref<const Vector>& z) {
  detail::require(x.size() == z.size(), "eval_kernel: dimension mismatch");
  spec.check_dimension(x.size());
  const Vector inv = inverse_sq_lengthscales(spec, x.size());
  const Vector xc = x;
  const Vector zc = z;
  return std::exp(-0.5 * scaled_sq_dist(xc.data(), zc.data(), inv.data(), x.size()));
}

Matrix kernel_matrix(const KernelSpec& spec, const Matrix& a, const Matrix& b) {
  detail::require(a.cols() == b.cols(), "kernel_matrix: dimension mismatch");
  const Index d = a.cols();
  spec.check_dimension(d);
  const Vector inv = inverse_sq_lengthscales(spec, d);
  // Points as contiguous columns.
  const Matrix at = a.transpose();
  const Matrix bt = b.transpose();
  Matrix k(a.rows(), b.rows());
  for (Index j = 0; j < b.rows(); ++j) {
    const double* zj = bt.col(j).data();
    for (Index i = 0; i < a.rows(); ++i) {
      k(i, j) = std::exp(-0.5 * scaled_sq_dist(at.col(i).data(), zj, inv.data(), d));
    }
  }
  return k;
}

Matrix kernel_matrix(const KernelSpec& spec, const Matrix& a) {
  const Index d = a.cols();
  spec.check_dimension(d);
  const Vector inv = inverse_sq_lengthscales(spec, d);
  const Matrix at = a.transpose();
  const Index n = a.rows();
  Matrix k(n, n);
  for (Index j = 0; j < n; ++j) {
    k(j, j) = 1.0;
    const double* zj = at.col(j).data();
    for (Index i = j + 1; i < n; ++i) {
      const double v =
          std::exp(-0.5 * scaled_sq_dist(at.col(i).data(), zj, inv.data(), d));
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

Vector kernel_vector(const KernelSpec& spec, const Eigen::Ref<const Vector>& x,
                     const Matrix& b) {
  detail::require(x.size() == b.cols(), "kernel_vector: dimension mismatch");
  const Index d = b.cols();
  spec.check_dimension(d);
  const Vector inv = inverse_sq_lengthscales(spec, d);
  const Vector xc = x;
  Vector k(b.rows());
  Vector row(d);
  for (Index j = 0; j < b.rows(); ++j) {
    row = b.row(j).transpose();
    k(j) = std::exp(-0.5 * scaled_sq_dist(xc.data(), row.data(), inv.data(), d));
  }
  return k;
}

}  // namespace gpdistill
