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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gpdistill/error.hpp"
#include "gpdistill/exact_gp.hpp"
#include "test_util.hpp"

namespace gpdistill {
namespace {

using testing::random_matrix;

Dataset make_data(Index n, Index d, std::uint64_t seed) {
  Rng rng(seed);
  Matrix x = random_matrix(n, d, rng);
  Vector y(n);
  for (Index i = 0; i < n; ++i) y(i) = std::sin(2.0 * x(i, 0)) + 0.1 * rng.normal();
  return Dataset::from_standardized(std::move(x), std::move(y));
}

// LML straight from the Gaussian density with a dense inverse.
double lml_oracle(const Dataset& data, const KernelSpec& s) {
  Matrix k = kernel_matrix(s, data.x);
  k.diagonal().array() += s.noise_variance;
  const double n = static_cast<double>(data.size());
  return -0.5 * data.y.dot(testing::dense_inverse(k) * data.y) - 0.5 * std::log(k.determinant()) -
         0.5 * n * std::log(2.0 * std::numbers::pi);
}

TEST(LogMarginalLikelihood, ValueMatchesDenseOracle) {
  const Dataset data = make_data(15, 2, 1);
  const KernelSpec s = KernelSpec::ard({0.7, 1.4}, 0.05);
  EXPECT_NEAR(log_marginal_likelihood(data, s).value, lml_oracle(data, s), 1e-9);
}

TEST(LogMarginalLikelihood, GradientMatchesFiniteDifferences) {
  for (KernelFamily family : {KernelFamily::kRbf, KernelFamily::kArd}) {
    const Dataset data = make_data(20, 3, 2);
    const KernelSpec s = family == KernelFamily::kRbf ? KernelSpec::rbf(0.9, 0.1)
                                                      : KernelSpec::ard({0.6, 1.1, 2.0}, 0.1);
    const Vector g = log_marginal_likelihood(data, s).gradient;
    const Vector p = s.log_params();
    ASSERT_EQ(g.size(), p.size());
    for (Index k = 0; k < p.size(); ++k) {
      const double h = 1e-5;
      Vector up = p, dn = p;
      up(k) += h;
      dn(k) -= h;
      const double fd = (log_marginal_likelihood(data, KernelSpec::from_log_params(family, up)).value -
                         log_marginal_likelihood(data, KernelSpec::from_log_params(family, dn)).value) /
                        (2 * h);
      EXPECT_NEAR(g(k), fd, 1e-6 * std::max(1.0, std::abs(fd))) << "param " << k;
    }
  }
}

TEST(TrainExact, ImprovesLikelihoodAndRespectsFloor) {
  const Dataset data = make_data(40, 1, 3);
  const KernelSpec init = KernelSpec::rbf(3.0, 0.5);
  TrainingTrace trace;
  const ExactGPModel m = train_exact(data, init, 40, 0.1, &trace);
  EXPECT_GT(log_marginal_likelihood(data, m.spec()).value,
            log_marginal_likelihood(data, init).value);
  EXPECT_GE(m.spec().noise_variance, kNoiseFloor);
  EXPECT_FALSE(trace.lml.empty());
}

TEST(TrainExact, ZeroStepsKeepsInit) {
  const Dataset data = make_data(10, 2, 4);
  const KernelSpec init = KernelSpec::ard({1.0, 2.0}, 0.1);
  EXPECT_EQ(train_exact(data, init, 0, 0.1).spec(), init);
}

TEST(PredictExact, MatchesDenseFormulas) {
  const Dataset data = make_data(25, 2, 5);
  const KernelSpec s = KernelSpec::ard({0.8, 1.2}, 0.05);
  const ExactGPModel model(data, s);
  Rng rng(6);
  const Matrix q = random_matrix(7, 2, rng);
  const Prediction p = predict_exact(model, q);

  Matrix k = kernel_matrix(s, data.x);
  k.diagonal().array() += s.noise_variance;
  const Matrix kinv = testing::dense_inverse(k);
  const Matrix ks = kernel_matrix(s, q, data.x);
  const Vector mean = ks * kinv * data.y;
  const Vector var = (Matrix::Identity(7, 7) - ks * kinv * ks.transpose()).diagonal();
  EXPECT_LT((p.mean - mean).norm(), 1e-10);
  EXPECT_LT((p.variance - var).norm(), 1e-10);
  EXPECT_EQ(p.clamped, 0);
}

TEST(PredictExact, FarQueryRevertsToPrior) {
  const Dataset data = make_data(10, 1, 7);
  const ExactGPModel model(data, KernelSpec::rbf(0.5, 0.1));
  Matrix q(1, 1);
  q << 1e3;
  const Prediction p = predict_exact(model, q);
  EXPECT_NEAR(p.mean(0), 0.0, 1e-12);
  EXPECT_NEAR(p.variance(0), 1.0, 1e-12);
}

TEST(ExactGPModel, DimensionAndSizeGuards) {
  const Dataset data = make_data(10, 2, 8);
  EXPECT_THROW(ExactGPModel(data, KernelSpec::ard({1.0, 1.0, 1.0}, 0.1)), ContractViolation);
  Dataset big;
  big.x = Matrix::Zero(kMaxDenseTrainingPoints + 1, 1);
  big.y = Vector::Zero(kMaxDenseTrainingPoints + 1);
  EXPECT_THROW(ExactGPModel(big, KernelSpec::rbf(1.0, 0.1)), ContractViolation);
}

}  // namespace
}  // namespace gpdistill
