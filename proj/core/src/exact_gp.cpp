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

#include "gpdistill/exact_gp.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "gpdistill/error.hpp"

namespace gpdistill {

namespace {

Matrix training_covariance(const Dataset& data, const KernelSpec& spec) {
  Matrix k = kernel_matrix(spec, data.x);
  k.diagonal().array() += spec.noise_variance;
  return k;
}

void check_inputs(const Dataset& data, const KernelSpec& spec) {
  detail::require(data.x.rows() == data.y.size(), "exact GP: target length mismatch");
  detail::require(data.x.rows() >= 1, "exact GP: empty dataset");
  detail::require(data.x.rows() <= kMaxDenseTrainingPoints,
                  "exact GP: n = " + std::to_string(data.x.rows()) +
                      " exceeds the dense limit of " +
                      std::to_string(kMaxDenseTrainingPoints));
  spec.check_dimension(data.x.cols());
}

}  // namespace

ExactGPModel::ExactGPModel(Dataset data, KernelSpec spec)
    : data_(std::move(data)), spec_(std::move(spec)) {
  check_inputs(data_, spec_);
  try {
    chol_ = Cholesky(training_covariance(data_, spec_));
  } catch (const FactorizationError& e) {
    throw FactorizationError(e.pivot(), std::string(e.what()) +
                                            "; try a larger noise variance floor");
  }
  alpha_ = chol_.solve(data_.y);
}

ExactGPModel::ExactGPModel(Dataset data, KernelSpec spec, Cholesky chol)
    : data_(std::move(data)), spec_(std::move(spec)), chol_(std::move(chol)) {
  check_inputs(data_, spec_);
  detail::require(chol_.size() == data_.size(), "ExactGPModel: factor size mismatch");
  alpha_ = chol_.solve(data_.y);
}

LogMarginalLikelihood log_marginal_likelihood(const Dataset& data,
                                              const KernelSpec& spec) {
  check_inputs(data, spec);
  const Index n = data.size();
  const Index d = data.dim();
  Matrix kf = kernel_matrix(spec, data.x);
  Matrix k = kf;
  k.diagonal().array() += spec.noise_variance;

  Cholesky chol;
  try {
    chol = Cholesky(k);
  } catch (const FactorizationError& e) {
    throw FactorizationError(e.pivot(), std::string(e.what()) +
                                            "; try a larger noise variance floor");
  }
  const Vector alpha = chol.solve(data.y);

  LogMarginalLikelihood out;
  out.value = -0.5 * data.y.dot(alpha) - chol.half_log_det() -
              0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);

  // dL/dtheta = 1/2 tr((alpha alpha^T - K^{-1}) dK/dtheta).
  Matrix w = alpha * alpha.transpose() - chol.inverse();
  out.gradient = Vector::Zero(spec.num_params());

  const bool ard = spec.family == KernelFamily::kArd;
  const Matrix xt = data.x.transpose();
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) {
      // Off-diagonal pairs count twice; diagonal terms have zero distance.
      const double weight = 2.0 * w(i, j) * kf(i, j);
      if (ard) {
        for (Index c = 0; c < d; ++c) {
          const double l = spec.lengthscales[static_cast<std::size_t>(c)];
          const double diff = xt(c, i) - xt(c, j);
          out.gradient(c) += weight * diff * diff / (l * l);
        }
      } else {
        const double l = spec.lengthscales.front();
        double r2 = 0.0;
        for (Index c = 0; c < d; ++c) {
          const double diff = xt(c, i) - xt(c, j);
          r2 += diff * diff;
        }
        out.gradient(0) += weight * r2 / (l * l);
      }
    }
  }
  out.gradient.head(spec.num_params() - 1) *= 0.5;
  out.gradient(spec.num_params() - 1) = 0.5 * spec.noise_variance * w.trace();
  return out;
}

ExactGPModel train_exact(const Dataset& data, const KernelSpec& init, int steps,
                         double learning_rate, TrainingTrace* trace) {
  detail::require(steps >= 0, "train_exact: steps must be >= 0");
  detail::require(learning_rate > 0.0, "train_exact: learning rate must be > 0");
  check_inputs(data, init);
  if (steps == 0) {
    if (trace) trace->lml = {log_marginal_likelihood(data, init).value};
    return ExactGPModel(data, init);
  }

  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  constexpr int kMaxHalvings = 20;
  const double log_noise_floor = std::log(kNoiseFloor);

  Vector theta = init.log_params();
  theta(theta.size() - 1) = std::max(theta(theta.size() - 1), log_noise_floor);
  LogMarginalLikelihood current = log_marginal_likelihood(data, init);

  Vector best_theta = theta;
  double best_value = current.value;
  Vector m1 = Vector::Zero(theta.size());
  Vector m2 = Vector::Zero(theta.size());
  if (trace) trace->lml = {current.value};

  for (int t = 1; t <= steps; ++t) {
    // Ascent direction.
    m1 = kBeta1 * m1 + (1.0 - kBeta1) * current.gradient;
    m2 = kBeta2 * m2 + (1.0 - kBeta2) * current.gradient.cwiseAbs2();
    const Vector m1_hat = m1 / (1.0 - std::pow(kBeta1, t));
    const Vector m2_hat = m2 / (1.0 - std::pow(kBeta2, t));
    const Vector step = m1_hat.array() / (m2_hat.array().sqrt() + kEps);

    double scale = learning_rate;
    bool accepted = false;
    for (int h = 0; h <= kMaxHalvings; ++h) {
      Vector proposal = theta + scale * step;
      proposal(proposal.size() - 1) = std::max(proposal(proposal.size() - 1), log_noise_floor);
      const KernelSpec spec = KernelSpec::from_log_params(init.family, proposal);
      try {
        LogMarginalLikelihood next = log_marginal_likelihood(data, spec);
        if (std::isfinite(next.value) && next.gradient.allFinite()) {
          theta = proposal;
          current = std::move(next);
          accepted = true;
          break;
        }
      } catch (const NumericalError&) {
      } catch (const ContractViolation&) {
        // Overflowed hyperparameters (inf lengthscale) land here.
      }
      scale *= 0.5;
      if (trace) ++trace->halvings;
    }
    if (!accepted) {
      throw NumericalError("train_exact: log marginal likelihood stayed non-finite after " +
                           std::to_string(kMaxHalvings) + " step halvings");
    }
    if (trace) trace->lml.push_back(current.value);
    if (current.value > best_value) {
      best_value = current.value;
      best_theta = theta;
    }
  }
  return ExactGPModel(data, KernelSpec::from_log_params(init.family, best_theta));
}

Prediction predict_exact(const ExactGPModel& model, const Matrix& queries) {
  const Dataset& data = model.data();
  detail::require(queries.cols() == data.dim(), "predict_exact: dimension mismatch");
  const Matrix ksx = kernel_matrix(model.spec(), queries, data.x);  // p x n
  Prediction out;
  out.mean = ksx * model.alpha();
  const Matrix v = model.chol().solve_lower(Matrix(ksx.transpose()));  // n x p
  out.variance = Vector::Ones(queries.rows()) - v.colwise().squaredNorm().transpose();
  out.clamped = detail::clamp_variances(out.variance);
  return out;
}

}  // namespace gpdistill
