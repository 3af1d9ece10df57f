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

#ifndef GPDISTILL_SPATIAL_INDEX_HPP_
#define GPDISTILL_SPATIAL_INDEX_HPP_

#include <cstdint>
#include <memory>
#include <vector>

#include "gpdistill/linalg.hpp"

namespace gpdistill {

// Neighbors of a query, nearest first. Equal distances are ordered by id.
struct NeighborList {
  std::vector<Index> indices;
  std::vector<double> distances;

  Index size() const { return static_cast<Index>(indices.size()); }
  // Ids sorted ascending (the support order used by SparseWeights).
  std::vector<Index> sorted_indices() const;
};

// Exact Euclidean k-nearest-neighbor index. Median split on the dimension of
// widest spread, leaves of at most kLeafSize points.
class KdTree {
 public:
  static constexpr Index kLeafSize = 16;

  KdTree() = default;
  explicit KdTree(const Matrix& points);

  Index size() const { return num_points_; }
  Index dim() const { return dim_; }

  // Returns min(b, size()) neighbors; b must be >= 1.
  NeighborList knn(const Eigen::Ref<const Vector>& query, Index b) const;

 private:
  struct Node {
    Index begin = 0;  // range into order_
    Index end = 0;
    Index split_dim = -1;  // -1 for leaves
    double split_value = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::vector<double> lo;  // bounding box
    std::vector<double> hi;
  };

  std::int32_t build(Index begin, Index end);
  const double* point(Index id) const { return coords_.data() + id * dim_; }

  Index num_points_ = 0;
  Index dim_ = 0;
  std::vector<double> coords_;  // row-major copy of the points
  std::vector<Index> order_;
  std::vector<Node> nodes_;
};

// Inducing points U (m x d) with a KD-tree over them. Ids are row indices.
class InducingSet {
 public:
  InducingSet() = default;
  explicit InducingSet(Matrix points);

  Index size() const { return points_.rows(); }
  Index dim() const { return points_.cols(); }
  const Matrix& points() const { return points_; }
  const KdTree& tree() const { return tree_; }

 private:
  Matrix points_;
  KdTree tree_;
};

// Exact b nearest inducing points; b > m returns all m.
NeighborList knn(const InducingSet& set, const Eigen::Ref<const Vector>& query,
                 Index b);

// Brute-force scan with the same distance arithmetic and tie rule as knn().
NeighborList knn_linear_scan(const Matrix& points,
                             const Eigen::Ref<const Vector>& query, Index b);

struct KMeansResult {
  Matrix centroids;                 // m x d
  std::vector<Index> assignment;    // per input row
  std::vector<double> wcss_trace;   // after seeding, then after each update
  int iterations = 0;
};

struct KMeansOptions {
  int max_iterations = 100;
  // Stop when every centroid moves less than this times the data scale
  // (largest per-dimension range).
  double tolerance = 1e-9;
};

// Lloyd's algorithm with k-means++ seeding. Pure function of (x, m, seed).
// Empty clusters are re-seeded at the point farthest from its centroid.
KMeansResult kmeans_detailed(const Matrix& x, Index m, std::uint64_t seed,
                             const KMeansOptions& options = {});

InducingSet kmeans(const Matrix& x, Index m, std::uint64_t seed);

// Within-cluster sum of squares for a given assignment.
double wcss(const Matrix& x, const Matrix& centroids,
            const std::vector<Index>& assignment);

}  // namespace gpdistill

#endif  // GPDISTILL_SPATIAL_INDEX_HPP_
