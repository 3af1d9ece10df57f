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

#include <algorithm>
#include <set>

#include "gpdistill/error.hpp"
#include "gpdistill/spatial_index.hpp"
#include "test_util.hpp"

namespace gpdistill {
namespace {

using testing::random_matrix;

TEST(KMeans, TwoClearClusters) {
  Matrix x(4, 1);
  x << 0.0, 0.1, 10.0, 10.1;
  const InducingSet u = kmeans(x, 2, 42);
  std::vector<double> c{u.points()(0, 0), u.points()(1, 0)};
  std::sort(c.begin(), c.end());
  EXPECT_NEAR(c[0], 0.05, 1e-12);
  EXPECT_NEAR(c[1], 10.05, 1e-12);

  // Brute force over all 2-partitions confirms the global optimum.
  double best = 1e300;
  for (int mask = 1; mask < 15; ++mask) {
    double sum[2] = {0, 0};
    int cnt[2] = {0, 0};
    for (int i = 0; i < 4; ++i) {
      sum[(mask >> i) & 1] += x(i, 0);
      ++cnt[(mask >> i) & 1];
    }
    double w = 0.0;
    for (int i = 0; i < 4; ++i) {
      const int g = (mask >> i) & 1;
      const double d = x(i, 0) - sum[g] / cnt[g];
      w += d * d;
    }
    best = std::min(best, w);
  }
  const KMeansResult r = kmeans_detailed(x, 2, 42);
  EXPECT_NEAR(wcss(x, r.centroids, r.assignment), best, 1e-12);
}

TEST(KMeans, EveryPointItsOwnCluster) {
  Rng rng(1);
  const Matrix x = random_matrix(12, 3, rng);
  const KMeansResult r = kmeans_detailed(x, 12, 3);
  EXPECT_NEAR(r.wcss_trace.back(), 0.0, 1e-20);
  std::set<Index> used(r.assignment.begin(), r.assignment.end());
  EXPECT_EQ(used.size(), 12u);
}

TEST(KMeans, SingleClusterIsColumnMean) {
  Rng rng(2);
  const Matrix x = random_matrix(50, 4, rng);
  const InducingSet u = kmeans(x, 1, 0);
  EXPECT_LT((u.points().row(0) - x.colwise().mean()).norm(), 1e-12);
}

TEST(KMeans, TooManyCentroidsRejected) {
  const Matrix x = Matrix::Zero(3, 2);
  EXPECT_THROW(kmeans(x, 4, 0), ContractViolation);
  EXPECT_THROW(kmeans(x, 0, 0), ContractViolation);
}

TEST(KMeans, DeterministicNonEmptyAndMonotone) {
  Rng rng(3);
  const Matrix x = random_matrix(400, 2, rng);
  const KMeansResult a = kmeans_detailed(x, 25, 17);
  const KMeansResult b = kmeans_detailed(x, 25, 17);
  EXPECT_EQ(a.centroids, b.centroids);
  EXPECT_EQ(a.assignment, b.assignment);
  for (std::size_t i = 1; i < a.wcss_trace.size(); ++i) {
    EXPECT_LE(a.wcss_trace[i], a.wcss_trace[i - 1] * (1 + 1e-12));
  }
  std::vector<int> count(25, 0);
  for (Index g : a.assignment) ++count[static_cast<std::size_t>(g)];
  for (int c : count) EXPECT_GT(c, 0);
  // Each centroid is the mean of its cluster.
  for (Index g = 0; g < 25; ++g) {
    Vector mean = Vector::Zero(2);
    int n = 0;
    for (Index i = 0; i < 400; ++i) {
      if (a.assignment[static_cast<std::size_t>(i)] == g) {
        mean += x.row(i).transpose();
        ++n;
      }
    }
    EXPECT_LT((mean / n - a.centroids.row(g).transpose()).norm(), 1e-12);
  }
}

TEST(KMeans, DuplicatePointsStillFillClusters) {
  Matrix x(6, 1);
  x << 1, 1, 1, 1, 2, 3;
  const KMeansResult r = kmeans_detailed(x, 3, 0);
  std::set<Index> used(r.assignment.begin(), r.assignment.end());
  EXPECT_EQ(used.size(), 3u);
}

TEST(Knn, MatchesLinearScanOnRandomQueries) {
  Rng rng(4);
  for (Index d : {1, 2, 3, 8}) {
    const InducingSet u(random_matrix(300, d, rng));
    for (int q = 0; q < 250; ++q) {
      const Vector query = testing::random_vector(d, rng, 1.5);
      const Index b = 1 + static_cast<Index>(rng.index(20));
      const NeighborList fast = knn(u, query, b);
      const NeighborList slow = knn_linear_scan(u.points(), query, b);
      ASSERT_EQ(fast.indices, slow.indices);
      ASSERT_EQ(fast.distances, slow.distances);
    }
  }
}

TEST(Knn, TiesBrokenBySmallerId) {
  Matrix pts(4, 1);
  pts << -1.0, 1.0, -1.0, 1.0;
  const InducingSet u(pts);
  Vector q(1);
  q << 0.0;
  const NeighborList r = knn(u, q, 3);
  EXPECT_EQ(r.indices, (std::vector<Index>{0, 1, 2}));
}

TEST(Knn, OversizedRequestReturnsAll) {
  Rng rng(5);
  const InducingSet u(random_matrix(7, 2, rng));
  const NeighborList r = knn(u, Vector::Zero(2), 50);
  EXPECT_EQ(r.size(), 7);
  for (Index i = 1; i < r.size(); ++i) {
    EXPECT_LE(r.distances[static_cast<std::size_t>(i - 1)], r.distances[static_cast<std::size_t>(i)]);
  }
  std::set<Index> distinct(r.indices.begin(), r.indices.end());
  EXPECT_EQ(distinct.size(), 7u);
}

TEST(Knn, QueryAtPointFindsItFirst) {
  Rng rng(6);
  const InducingSet u(random_matrix(100, 3, rng));
  for (Index j = 0; j < 100; ++j) {
    const NeighborList r = knn(u, u.points().row(j).transpose(), 1);
    EXPECT_EQ(r.indices[0], j);
    EXPECT_EQ(r.distances[0], 0.0);
  }
}

}  // namespace
}  // namespace gpdistill
