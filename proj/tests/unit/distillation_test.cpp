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

#include "gpdistill/distillation.hpp"
#include "gpdistill/error.hpp"
#include "gpdistill/synthetic.hpp"
#include "test_util.hpp"

namespace gpdistill {
namespace {

using testing::random_matrix;

struct Problem {
  KernelSpec spec;
  Matrix x;
  InducingSet inducing;
  Matrix k_xx;
  Matrix k_xu;
  Matrix k_uu;
};

Problem make_problem(Index n, Index m, Index d, std::uint64_t seed) {
  Rng rng(seed);
  Problem p;
  p.spec = d == 1 ? KernelSpec::rbf(1.2, 0.1) : KernelSpec::ard({1.2, 1.5}, 0.1);
  p.x = random_matrix(n, d, rng);
  p.inducing = InducingSet(random_matrix(m, d, rng));
  p.k_xx = kernel_matrix(p.spec, p.x);
  p.k_xu = kernel_matrix(p.spec, p.x, p.inducing.points());
  p.k_uu = kernel_matrix(p.spec, p.inducing.points());
  return p;
}

SparseWeights full_support(Index n, Index m, Rng& rng) {
  std::vector<std::vector<Index>> s(static_cast<std::size_t>(n));
  for (auto& row : s) {
    for (Index j = 0; j < m; ++j) row.push_back(j);
  }
  SparseWeights w(m, s);
  for (double& v : w.all_values()) v = 0.3 * rng.normal();
  return w;
}

TEST(InitWeights, FullSupportReproducesCrossCovariance) {
  const Problem p = make_problem(15, 5, 2, 1);
  const SparseWeights w = init_weights(p.k_xu, p.k_uu, p.inducing, p.x, 5);
  EXPECT_LT((w.times(p.k_uu) - p.k_xu).norm(), 1e-8);
}

TEST(InitWeights, CoincidentPointIsOneHot) {
  Rng rng(2);
  const Matrix u = random_matrix(6, 2, rng);
  const InducingSet inducing(u);
  const KernelSpec s = KernelSpec::ard({1.0, 1.0}, 0.1);
  const Matrix x = u.row(4);
  const SparseWeights w =
      init_weights(kernel_matrix(s, x, u), kernel_matrix(s, u), inducing, x, 1);
  ASSERT_EQ(w.support(0).size(), 1u);
  EXPECT_EQ(w.support(0)[0], 4);
  EXPECT_NEAR(w.values(0)[0], 1.0, 1e-12);
}

TEST(InitWeights, MatchesSvdLeastSquaresOnNearestSupport) {
  const Problem p = make_problem(5, 3, 2, 3);
  const SparseWeights w = init_weights(p.k_xu, p.k_uu, p.inducing, p.x, 2);
  for (Index i = 0; i < 5; ++i) {
    const auto expected_support = testing::brute_knn(p.inducing.points(), p.x.row(i).transpose(), 2);
    const auto s = w.support(i);
    ASSERT_EQ(std::vector<Index>(s.begin(), s.end()), expected_support);
    Matrix a(3, 2);
    for (Index c = 0; c < 2; ++c) a.col(c) = p.k_uu.col(expected_support[static_cast<std::size_t>(c)]);
    const Vector beta = testing::svd_lstsq(a, p.k_xu.row(i).transpose());
    for (Index c = 0; c < 2; ++c) EXPECT_NEAR(w.values(i)[static_cast<std::size_t>(c)], beta(c), 1e-10);
  }
}

TEST(InitWeights, RejectsBadSparsity) {
  const Problem p = make_problem(5, 3, 2, 4);
  EXPECT_THROW(init_weights(p.k_xu, p.k_uu, p.inducing, p.x, 0), ContractViolation);
  EXPECT_THROW(init_weights(p.k_xu, p.k_uu, p.inducing, p.x, 4), ContractViolation);
}

TEST(Objective, MatchesDenseFrobeniusNorm) {
  const Problem p = make_problem(10, 4, 2, 5);
  Rng rng(6);
  const SparseWeights w = full_support(10, 4, rng);
  const Matrix wd = w.to_dense();
  EXPECT_NEAR(objective(p.k_xx, w, p.k_uu), (wd * p.k_uu * wd.transpose() - p.k_xx).norm(), 1e-12);
  EXPECT_THROW(objective(p.k_uu, w, p.k_uu), ContractViolation);
}

TEST(Objective, ZeroWeightsGiveKernelNorm) {
  const Problem p = make_problem(7, 3, 2, 7);
  SparseWeights w(3, std::vector<std::vector<Index>>(7, {0}));
  EXPECT_NEAR(objective(p.k_xx, w, p.k_uu), p.k_xx.norm(), 1e-14);
}

TEST(Gradient, AnalyticMatchesFiniteDifferencesOfSquaredObjective) {
  const Problem p = make_problem(6, 3, 2, 8);
  Rng rng(9);
  const SparseWeights w = full_support(6, 3, rng);
  const Matrix g = gradient(p.k_xx, w, p.k_uu, GradientMode::kAnalyticFnorm);
  const double h = 1e-6;
  for (Index i = 0; i < 6; ++i) {
    for (Index j = 0; j < 3; ++j) {
      Matrix up = w.to_dense();
      Matrix dn = up;
      up(i, j) += h;
      dn(i, j) -= h;
      const double fu = objective(p.k_xx, w.with_values_from(up), p.k_uu);
      const double fd = objective(p.k_xx, w.with_values_from(dn), p.k_uu);
      EXPECT_NEAR(g(i, j), (fu * fu - fd * fd) / (2 * h), 1e-6 * std::max(1.0, std::abs(g(i, j))));
    }
  }
}

TEST(Gradient, DiagonalDoublingModeAddsDiagonalTerm) {
  const Problem p = make_problem(8, 4, 2, 10);
  Rng rng(11);
  const SparseWeights w = full_support(8, 4, rng);
  const Matrix wd = w.to_dense();
  const Matrix pm = wd * p.k_uu;
  const Matrix e = pm * wd.transpose() - p.k_xx;
  const Matrix expected = e * pm + e.diagonal().asDiagonal() * pm;
  EXPECT_LT((gradient(p.k_xx, w, p.k_uu, GradientMode::kPaperAlg1) - expected).norm(), 1e-11);
  EXPECT_LT((gradient(p.k_xx, w, p.k_uu, GradientMode::kAnalyticFnorm) - 4.0 * e * pm).norm(), 1e-11);
}

TEST(Gradient, SmallSymbolicCase) {
  // n = 3, m = 2, K_UU = I, K_XX = 0: E = W W^T, analytic gradient 4 W W^T W.
  Matrix kxx = Matrix::Zero(3, 3);
  Matrix kuu = Matrix::Identity(2, 2);
  SparseWeights w(2, {{0, 1}, {0, 1}, {0, 1}});
  const std::vector<double> vals{1, 0, 0, 1, 1, 1};
  w.all_values() = vals;
  const Matrix wd = w.to_dense();
  const Matrix e = wd * wd.transpose();
  EXPECT_LT((gradient(kxx, w, kuu, GradientMode::kAnalyticFnorm) - 4.0 * e * wd).norm(), 1e-14);
  Matrix e2 = e;
  e2.diagonal() *= 2.0;
  EXPECT_LT((gradient(kxx, w, kuu, GradientMode::kPaperAlg1) - e2 * wd).norm(), 1e-14);
}

TEST(Gradient, ProjectedEqualsProjectionOfDense) {
  const Problem p = make_problem(20, 8, 2, 12);
  const SparseWeights w = init_weights(p.k_xu, p.k_uu, p.inducing, p.x, 3);
  for (GradientMode mode : {GradientMode::kAnalyticFnorm, GradientMode::kPaperAlg1}) {
    const SparseWeights pg = projected_gradient(p.k_xx, w, p.k_uu, mode);
    const SparseWeights ref = project_rows(gradient(p.k_xx, w, p.k_uu, mode), w);
    EXPECT_TRUE(pg.same_support(w));
    EXPECT_LT((pg.to_dense() - ref.to_dense()).norm(), 1e-10);
    EXPECT_EQ(project_rows(ref.to_dense(), w).to_dense(), ref.to_dense());
  }
}

TEST(Gradient, VanishesAtExactFactorization) {
  // U = X and W = I give E = 0.
  const Problem p = make_problem(6, 6, 2, 13);
  const SparseWeights w = SparseWeights::identity(6);
  EXPECT_LT(gradient(p.k_uu, w, p.k_uu, GradientMode::kAnalyticFnorm).norm(), 1e-14);
  EXPECT_LT(gradient(p.k_uu, w, p.k_uu, GradientMode::kPaperAlg1).norm(), 1e-14);
}

DistillConfig small_config(Index m, Index b, int iters) {
  DistillConfig cfg;
  cfg.m = m;
  cfg.b = b;
  cfg.iterations = iters;
  return cfg;
}

TEST(DistillKernel, InducingAtDataRecoversKernel) {
  Rng rng(14);
  const Matrix x = random_matrix(12, 2, rng, 2.0);
  const KernelSpec s = KernelSpec::ard({1.0, 1.0}, 0.1);
  const KernelDistillation kd = distill_kernel(s, x, InducingSet(x), small_config(12, 12, 5));
  EXPECT_LT(kd.final_objective(), 1e-8);
}

TEST(DistillKernel, LineSearchTraceIsMonotoneAndSupportsFixed) {
  const Problem p = make_problem(80, 15, 2, 15);
  const DistillConfig cfg = small_config(15, 3, 30);
  const KernelDistillation kd = distill_kernel(p.spec, p.x, p.inducing, cfg);
  ASSERT_GE(kd.log.size(), 2u);
  for (std::size_t i = 1; i < kd.log.size(); ++i) {
    EXPECT_LT(kd.log[i].objective, kd.log[i - 1].objective);
    EXPECT_EQ(kd.log[i].iteration, static_cast<int>(i));
    EXPECT_GT(kd.log[i].step_size, 0.0);
  }
  const SparseWeights init = init_weights(p.k_xu, p.k_uu, p.inducing, p.x, 3);
  EXPECT_TRUE(kd.weights.same_support(init));
  EXPECT_EQ(kd.weights.max_row_support(), 3);
  EXPECT_NEAR(kd.log.front().objective, objective(p.k_xx, init, p.k_uu), 1e-12);
  EXPECT_NEAR(kd.final_objective(), objective(p.k_xx, kd.weights, p.k_uu), 1e-12);
}

TEST(DistillKernel, DiagonalDoublingGradientAlsoDescends) {
  const Problem p = make_problem(60, 12, 2, 16);
  DistillConfig cfg = small_config(12, 3, 20);
  cfg.gradient_mode = GradientMode::kPaperAlg1;
  const KernelDistillation kd = distill_kernel(p.spec, p.x, p.inducing, cfg);
  EXPECT_LT(kd.final_objective(), kd.log.front().objective);
}

TEST(DistillKernel, FixedStepDescendsForSmallStep) {
  const Problem p = make_problem(40, 10, 2, 17);
  DistillConfig cfg = small_config(10, 3, 10);
  cfg.line_search = false;
  const KernelDistillation kd = distill_kernel(p.spec, p.x, p.inducing, cfg);
  ASSERT_EQ(kd.log.size(), 11u);
  EXPECT_LE(kd.final_objective(), kd.log.front().objective);
}

TEST(DistillKernel, Deterministic) {
  const Problem p = make_problem(50, 10, 2, 18);
  const DistillConfig cfg = small_config(10, 4, 15);
  const KernelDistillation a = distill_kernel(p.spec, p.x, p.inducing, cfg);
  const KernelDistillation b = distill_kernel(p.spec, p.x, p.inducing, cfg);
  EXPECT_EQ(a.weights.all_values(), b.weights.all_values());
  EXPECT_EQ(a.final_objective(), b.final_objective());
}

TEST(DistillKernel, DivergentFixedStepThrows) {
  const Problem p = make_problem(30, 8, 2, 19);
  DistillConfig cfg = small_config(8, 3, 50);
  cfg.line_search = false;
  cfg.eta = 1e12;
  EXPECT_THROW(distill_kernel(p.spec, p.x, p.inducing, cfg), NumericalError);
}

TEST(DistillKernel, ZeroIterationsKeepsInitialization) {
  const Problem p = make_problem(30, 8, 2, 20);
  DistillConfig cfg = small_config(8, 3, 0);
  const KernelDistillation tracked = distill_kernel(p.spec, p.x, p.inducing, cfg);
  ASSERT_EQ(tracked.log.size(), 1u);
  cfg.track_objective = false;
  const KernelDistillation bare = distill_kernel(p.spec, p.x, p.inducing, cfg);
  EXPECT_TRUE(bare.log.empty());
  EXPECT_EQ(bare.weights.all_values(),
            init_weights(p.k_xu, p.k_uu, p.inducing, p.x, 3).all_values());
}

TEST(DistillKernel, RejectsBadConfig) {
  const Problem p = make_problem(20, 5, 2, 21);
  EXPECT_THROW(distill_kernel(p.spec, p.x, p.inducing, small_config(5, 6, 1)), ContractViolation);
  EXPECT_THROW(distill_kernel(p.spec, p.x, p.inducing, small_config(6, 3, 1)), ContractViolation);
  DistillConfig bad_eta = small_config(5, 2, 1);
  bad_eta.eta = -1.0;
  EXPECT_THROW(bad_eta.validate(), ContractViolation);
  Matrix big = Matrix::Zero(kMaxDenseTrainingPoints + 1, 2);
  EXPECT_THROW(distill_kernel(p.spec, big, p.inducing, small_config(5, 2, 1)), ContractViolation);
}

TEST(ErrorVsSparsity, DecreasesAndMatchesSingleRuns) {
  const Vector x = reconstruction_inputs(300, 0);
  const KernelSpec s = KernelSpec::rbf(10.0, 0.01);
  const InducingSet u = kmeans(Matrix(x), 40, 0);
  const DistillConfig cfg = small_config(40, 1, 20);
  const std::vector<Index> bs{2, 4, 6, 8};
  const auto curve = error_vs_sparsity(s, Matrix(x), u, cfg, bs);
  ASSERT_EQ(curve.size(), 4u);
  for (std::size_t i = 1; i < curve.size(); ++i) EXPECT_LT(curve[i].second, curve[i - 1].second);
  DistillConfig single = cfg;
  single.b = 6;
  EXPECT_EQ(curve[2].second, distill_kernel(s, Matrix(x), u, single).final_objective());
  EXPECT_THROW(error_vs_sparsity(s, Matrix(x), u, cfg, {4, 2}), ContractViolation);
}

TEST(Distill, TeacherPipelineProducesConsistentModel) {
  const SyntheticData d = gp_draw_1d(120, 1.0, 0.1, 3);
  const ExactGPModel teacher(Dataset::from_standardized(d.x, d.y), KernelSpec::rbf(1.0, 0.01));
  const DistillResult r = distill(teacher, small_config(20, 5, 10), 7);
  EXPECT_EQ(r.model.inducing.size(), 20);
  EXPECT_EQ(r.model.b, 5);
  EXPECT_EQ(r.model.alpha_tilde.size(), 20);
  EXPECT_EQ(r.model.v.rows(), 20);
  ASSERT_TRUE(r.model.weights.has_value());
  EXPECT_EQ(r.model.weights->rows(), 120);
  EXPECT_THROW(distill(teacher, small_config(121, 5, 1), 7), ContractViolation);
}

}  // namespace
}  // namespace gpdistill
