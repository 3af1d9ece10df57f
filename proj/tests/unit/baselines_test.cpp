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

#include "gpdistill/baselines.hpp"
#include "gpdistill/error.hpp"
#include "gpdistill/synthetic.hpp"
#include "test_util.hpp"

namespace gpdistill {
namespace {

using testing::dense_inverse;
using testing::random_matrix;

struct DenseSparseOracle {
  Vector mean;
  Vector variance;
};

// Textbook SoR / FITC predictive equations with explicit inverses.
DenseSparseOracle sparse_oracle(const Dataset& data, const KernelSpec& s, const Matrix& u,
                                const Matrix& q, bool fitc) {
  const Matrix kuu_inv = dense_inverse(kernel_matrix(s, u));
  const Matrix kxu = kernel_matrix(s, data.x, u);
  const Matrix ksu = kernel_matrix(s, q, u);
  const Matrix qxx = kxu * kuu_inv * kxu.transpose();
  const Matrix qsx = ksu * kuu_inv * kxu.transpose();
  const Matrix qss = ksu * kuu_inv * ksu.transpose();
  Matrix cov = qxx;
  cov.diagonal().array() += s.noise_variance;
  if (fitc) cov.diagonal() += (Vector::Ones(data.size()) - qxx.diagonal());
  const Matrix ci = dense_inverse(cov);
  DenseSparseOracle o;
  o.mean = qsx * ci * data.y;
  const Vector prior = fitc ? Vector::Ones(q.rows()) : Vector(qss.diagonal());
  o.variance = prior - (qsx * ci * qsx.transpose()).diagonal();
  return o;
}

Dataset random_data(Index n, Index d, std::uint64_t seed) {
  Rng rng(seed);
  Matrix x = random_matrix(n, d, rng);
  Vector y = testing::random_vector(n, rng);
  return Dataset::from_standardized(std::move(x), std::move(y));
}

TEST(SorFitc, MatchesDenseOracle) {
  for (const auto& [n, m] : {std::pair<Index, Index>{6, 3}, std::pair<Index, Index>{8, 4}}) {
    const Dataset data = random_data(n, 2, 10 + static_cast<std::uint64_t>(n));
    Rng rng(20);
    const Matrix u = random_matrix(m, 2, rng);
    const Matrix q = random_matrix(5, 2, rng);
    const KernelSpec s = KernelSpec::ard({0.9, 1.3}, 0.2);
    for (bool fitc : {false, true}) {
      const SorFitcModel model = fit_sor_fitc(data, s, InducingSet(u),
                                              fitc ? InducingVariant::kFitc : InducingVariant::kSoR);
      ASSERT_EQ(model.jitter, 0.0);
      const Prediction p = predict_sor_fitc(model, q);
      const DenseSparseOracle o = sparse_oracle(data, s, u, q, fitc);
      EXPECT_LT((p.mean - o.mean).norm(), 1e-9) << "fitc=" << fitc;
      EXPECT_LT((p.variance - o.variance).norm(), 1e-9) << "fitc=" << fitc;
    }
  }
}

TEST(SorFitc, InducingAtDataWithTinyNoiseInterpolates) {
  Rng rng(3);
  Matrix x(6, 1);
  x << 0.0, 1.5, 3.0, 4.5, 6.0, 7.5;
  const Dataset data = Dataset::from_standardized(x, testing::random_vector(6, rng));
  const KernelSpec s = KernelSpec::rbf(0.8, 1e-8);
  const SorFitcModel model = fit_sor_fitc(data, s, InducingSet(data.x), InducingVariant::kSoR);
  const Prediction p = predict_sor_fitc(model, data.x);
  EXPECT_LT((p.mean - data.y).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(SorFitc, FarQueryDegeneracy) {
  const Dataset data = random_data(10, 1, 4);
  Rng rng(5);
  const InducingSet u(random_matrix(4, 1, rng));
  const KernelSpec s = KernelSpec::rbf(0.7, 0.1);
  Matrix far(1, 1);
  far << 500.0;
  const Prediction sor = predict_sor_fitc(fit_sor_fitc(data, s, u, InducingVariant::kSoR), far);
  const Prediction fitc = predict_sor_fitc(fit_sor_fitc(data, s, u, InducingVariant::kFitc), far);
  EXPECT_NEAR(sor.mean(0), 0.0, 1e-12);
  EXPECT_NEAR(sor.variance(0), 0.0, 1e-12);
  EXPECT_NEAR(fitc.mean(0), 0.0, 1e-12);
  EXPECT_NEAR(fitc.variance(0), 1.0, 1e-12);
}

TEST(SorFitc, ImpliedKernelPsdAndDiagonalOnlyDifference) {
  const Dataset data = random_data(30, 2, 6);
  Rng rng(7);
  const InducingSet u(random_matrix(6, 2, rng));
  const KernelSpec s = KernelSpec::ard({1.0, 0.8}, 0.1);
  const Matrix q_sor = implied_kernel(fit_sor_fitc(data, s, u, InducingVariant::kSoR));
  const Matrix q_fitc = implied_kernel(fit_sor_fitc(data, s, u, InducingVariant::kFitc));
  Eigen::SelfAdjointEigenSolver<Matrix> eig(q_sor);
  EXPECT_GT(eig.eigenvalues().minCoeff(), -1e-8);
  Matrix off = q_sor - q_fitc;
  off.diagonal().setZero();
  EXPECT_EQ(off.norm(), 0.0);
  EXPECT_LT((q_fitc.diagonal() - Vector::Ones(30)).norm(), 1e-12);
  EXPECT_LT((sor_kernel_approximation(s, data.x, u) - q_sor).norm(), 1e-12);
}

TEST(KissWeights, OnGridNodeIsOneHot) {
  Grid1d g;
  g.start = -1.0;
  g.spacing = 0.5;
  g.size = 10;
  Vector x(1);
  x << 0.5;  // node 3
  const auto rows = cubic_interpolation_weights(x, g);
  ASSERT_EQ(rows[0].columns.size(), 1u);
  EXPECT_EQ(rows[0].columns[0], 3);
  EXPECT_EQ(rows[0].weights[0], 1.0);
}

TEST(KissWeights, PartitionOfUnityAndSparsity) {
  Rng rng(8);
  Vector x(500);
  for (Index i = 0; i < 500; ++i) x(i) = rng.uniform(-3.0, 7.0);
  const Grid1d g = Grid1d::covering(x, 50);
  EXPECT_LE(g.start, x.minCoeff() - 2 * g.spacing + 1e-12);
  EXPECT_GE(g.start + g.spacing * static_cast<double>(g.size - 1), x.maxCoeff() + 2 * g.spacing - 1e-9);
  for (const auto& row : cubic_interpolation_weights(x, g)) {
    EXPECT_LE(row.columns.size(), 4u);
    double sum = 0.0;
    for (double w : row.weights) sum += w;
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

// Keys' a = -0.5 kernel reproduces polynomials up to degree two exactly;
// a cubic is interpolated with O(h^3) error only.
TEST(KissWeights, ReproducesQuadratics) {
  Rng rng(9);
  Vector x(200);
  for (Index i = 0; i < 200; ++i) x(i) = rng.uniform(0.0, 5.0);
  const Grid1d g = Grid1d::covering(x, 40);
  const Vector nodes = g.nodes();
  const auto poly = [](double t) { return 0.7 * t * t - 2.0 * t + 0.3; };
  const auto rows = cubic_interpolation_weights(x, g);
  for (Index i = 0; i < 200; ++i) {
    double v = 0.0;
    const auto& r = rows[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < r.columns.size(); ++k) v += r.weights[k] * poly(nodes(r.columns[k]));
    EXPECT_NEAR(v, poly(x(i)), 1e-10);
  }
}

TEST(KissWeights, KeysKernelValues) {
  EXPECT_EQ(keys_cubic(0.0), 1.0);
  EXPECT_EQ(keys_cubic(1.0), 0.0);
  EXPECT_EQ(keys_cubic(2.0), 0.0);
  EXPECT_EQ(keys_cubic(2.5), 0.0);
  EXPECT_NEAR(keys_cubic(0.5), 0.5625, 1e-15);
  EXPECT_NEAR(keys_cubic(1.5), -0.0625, 1e-15);
  EXPECT_EQ(keys_cubic(-0.5), keys_cubic(0.5));
}

TEST(Kiss1d, MatchesSubstitutionOracle) {
  Rng rng(10);
  Matrix x(10, 1);
  for (Index i = 0; i < 10; ++i) x(i, 0) = rng.uniform(-2.0, 2.0);
  const Dataset data = Dataset::from_standardized(x, testing::random_vector(10, rng));
  const KernelSpec s = KernelSpec::rbf(0.9, 0.1);
  const Kiss1dModel model = fit_kiss1d(data, s, 8);
  Matrix q(6, 1);
  q << -2.1, -1.0, 0.0, 0.3, 1.7, 2.05;
  const Prediction p = predict_kiss1d(model, q);

  const Matrix w = interpolation_matrix(cubic_interpolation_weights(x.col(0), model.grid), 8);
  const Matrix ws = interpolation_matrix(cubic_interpolation_weights(q.col(0), model.grid), 8);
  const Matrix kgg = kernel_matrix(s, Matrix(model.grid.nodes()));
  Matrix kt = w * kgg * w.transpose();
  kt.diagonal().array() += s.noise_variance;
  const Matrix ci = dense_inverse(kt);
  const Matrix ksx = ws * kgg * w.transpose();
  const Vector mean = ksx * ci * data.y;
  const Vector var = (ws * kgg * ws.transpose() - ksx * ci * ksx.transpose()).diagonal();
  EXPECT_LT((p.mean - mean).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT((p.variance - var).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Kiss1d, RejectsBadInput) {
  const Dataset d2 = random_data(10, 2, 11);
  EXPECT_THROW(fit_kiss1d(d2, KernelSpec::ard({1.0, 1.0}, 0.1), 10), ContractViolation);
  const Dataset d1 = random_data(10, 1, 12);
  EXPECT_THROW(fit_kiss1d(d1, KernelSpec::rbf(1.0, 0.1), 3), ContractViolation);
}

TEST(Kiss1d, FarQueryVarianceBelowPrior) {
  Rng rng(13);
  Matrix x(40, 1);
  for (Index i = 0; i < 40; ++i) x(i, 0) = rng.uniform(-5.0, 5.0);
  const Dataset data = Dataset::from_standardized(x, testing::random_vector(40, rng));
  const Kiss1dModel model = fit_kiss1d(data, KernelSpec::rbf(1.0, 0.1), 30);
  Matrix q(1, 1);
  q << 5.0 + 2.5 * model.grid.spacing;  // between the last nodes, past the data
  EXPECT_LT(predict_kiss1d(model, q).variance(0), 1.0);
}

TEST(Kiss1d, GridRefinementReducesReconstructionError) {
  const Vector x = reconstruction_inputs(1000, 0);
  const KernelSpec s = KernelSpec::rbf(10.0, 0.01);
  const Matrix kxx = kernel_matrix(s, Matrix(x));
  double prev = 1e300;
  for (Index m : {50, 100, 200, 400}) {
    const double e = fro_diff(kxx, kiss_kernel_approximation(s, x, Grid1d::covering(x, m)));
    EXPECT_LT(e, prev) << "grid " << m;
    prev = e;
  }
}

}  // namespace
}  // namespace gpdistill
