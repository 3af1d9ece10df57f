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

#include "gpdistill/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <utility>

#include "gpdistill/error.hpp"
#include "gpdistill/random.hpp"

namespace gpdistill {

namespace {

inline double sq_dist(const double* a, const double* b, Index d) {
  double acc = 0.0;
  for (Index k = 0; k < d; ++k) {
    const double diff = a[k] - b[k];
    acc += diff * diff;
  }
  return acc;
}

// (squared distance, id), ordered lexicographically.
using Candidate = std::pair<double, Index>;

NeighborList finish(std::vector<Candidate> found) {
  std::sort(found.begin(), found.end());
  NeighborList out;
  out.indices.reserve(found.size());
  out.distances.reserve(found.size());
  for (const auto& [d2, id] : found) {
    out.indices.push_back(id);
    out.distances.push_back(std::sqrt(d2));
  }
  return out;
}

}  // namespace

std::vector<Index> NeighborList::sorted_indices() const {
  std::vector<Index> ids = indices;
  std::sort(ids.begin(), ids.end());
  return ids;
}

KdTree::KdTree(const Matrix& points)
    : num_points_(points.rows()), dim_(points.cols()) {
  detail::require(num_points_ >= 1, "KdTree: need at least one point");
  detail::require(points.allFinite(), "KdTree: points must be finite");
  coords_.resize(static_cast<std::size_t>(num_points_ * dim_));
  for (Index i = 0; i < num_points_; ++i) {
    for (Index k = 0; k < dim_; ++k) coords_[static_cast<std::size_t>(i * dim_ + k)] = points(i, k);
  }
  order_.resize(static_cast<std::size_t>(num_points_));
  std::iota(order_.begin(), order_.end(), Index{0});
  nodes_.reserve(static_cast<std::size_t>(2 * (num_points_ / kLeafSize + 1)));
  build(0, num_points_);
}

std::int32_t KdTree::build(Index begin, Index end) {
  Node node;
  node.begin = begin;
  node.end = end;
  node.lo.assign(static_cast<std::size_t>(dim_), std::numeric_limits<double>::infinity());
  node.hi.assign(static_cast<std::size_t>(dim_), -std::numeric_limits<double>::infinity());
  for (Index p = begin; p < end; ++p) {
    const double* x = point(order_[static_cast<std::size_t>(p)]);
    for (Index k = 0; k < dim_; ++k) {
      node.lo[static_cast<std::size_t>(k)] = std::min(node.lo[static_cast<std::size_t>(k)], x[k]);
      node.hi[static_cast<std::size_t>(k)] = std::max(node.hi[static_cast<std::size_t>(k)], x[k]);
    }
  }
  const auto self = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(std::move(node));

  if (end - begin <= kLeafSize) return self;

  Index widest = 0;
  double spread = -1.0;
  for (Index k = 0; k < dim_; ++k) {
    const double s = nodes_[static_cast<std::size_t>(self)].hi[static_cast<std::size_t>(k)] -
                     nodes_[static_cast<std::size_t>(self)].lo[static_cast<std::size_t>(k)];
    if (s > spread) {
      spread = s;
      widest = k;
    }
  }
  // All points identical: keep as an (oversized) leaf.
  if (spread <= 0.0) return self;

  const Index mid = begin + (end - begin) / 2;
  auto first = order_.begin() + begin;
  std::nth_element(first, order_.begin() + mid, order_.begin() + end,
                   [&](Index a, Index b) {
                     const double va = point(a)[widest];
                     const double vb = point(b)[widest];
                     return va < vb || (va == vb && a < b);
                   });
  const double split_value = point(order_[static_cast<std::size_t>(mid)])[widest];

  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  Node& n = nodes_[static_cast<std::size_t>(self)];
  n.split_dim = widest;
  n.split_value = split_value;
  n.left = left;
  n.right = right;
  return self;
}

NeighborList KdTree::knn(const Eigen::Ref<const Vector>& query, Index b) const {
  detail::require(b >= 1, "knn: b must be >= 1");
  detail::require(query.size() == dim_, "knn: query dimension mismatch");
  const Index k = std::min(b, num_points_);
  const Vector q = query;

  // Max-heap on (d2, id): top is the current worst kept neighbor.
  std::priority_queue<Candidate> heap;

  auto box_sq_dist = [&](const Node& node) {
    double acc = 0.0;
    for (Index j = 0; j < dim_; ++j) {
      const double v = q(j);
      const double lo = node.lo[static_cast<std::size_t>(j)];
      const double hi = node.hi[static_cast<std::size_t>(j)];
      double diff = 0.0;
      if (v < lo) diff = lo - v;
      else if (v > hi) diff = v - hi;
      acc += diff * diff;
    }
    return acc;
  };

  // Iterative depth-first search, nearer child first.
  std::vector<std::int32_t> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[static_cast<std::size_t>(stack.back())];
    stack.pop_back();
    // Equal box distance may still hold a smaller-id tie, so only prune on >.
    if (static_cast<Index>(heap.size()) == k && box_sq_dist(node) > heap.top().first) {
      continue;
    }
    if (node.split_dim < 0) {
      for (Index p = node.begin; p < node.end; ++p) {
        const Index id = order_[static_cast<std::size_t>(p)];
        const Candidate c{sq_dist(q.data(), point(id), dim_), id};
        if (static_cast<Index>(heap.size()) < k) {
          heap.push(c);
        } else if (c < heap.top()) {
          heap.pop();
          heap.push(c);
        }
      }
      continue;
    }
    const bool go_left = q(node.split_dim) < node.split_value;
    const std::int32_t near = go_left ? node.left : node.right;
    const std::int32_t far = go_left ? node.right : node.left;
    stack.push_back(far);
    stack.push_back(near);
  }

  std::vector<Candidate> found;
  found.reserve(heap.size());
  while (!heap.empty()) {
    found.push_back(heap.top());
    heap.pop();
  }
  return finish(std::move(found));
}

InducingSet::InducingSet(Matrix points) : points_(std::move(points)), tree_(points_) {}

NeighborList knn(const InducingSet& set, const Eigen::Ref<const Vector>& query,
                 Index b) {
  return set.tree().knn(query, b);
}

NeighborList knn_linear_scan(const Matrix& points,
                             const Eigen::Ref<const Vector>& query, Index b) {
  detail::require(b >= 1, "knn: b must be >= 1");
  detail::require(query.size() == points.cols(), "knn: query dimension mismatch");
  const Index d = points.cols();
  const Vector q = query;
  Vector row(d);
  std::vector<Candidate> all;
  all.reserve(static_cast<std::size_t>(points.rows()));
  for (Index i = 0; i < points.rows(); ++i) {
    row = points.row(i).transpose();
    all.emplace_back(sq_dist(q.data(), row.data(), d), i);
  }
  const auto k = static_cast<std::size_t>(std::min(b, points.rows()));
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end());
  all.resize(k);
  return finish(std::move(all));
}

double wcss(const Matrix& x, const Matrix& centroids,
            const std::vector<Index>& assignment) {
  double total = 0.0;
  for (Index i = 0; i < x.rows(); ++i) {
    total += (x.row(i) - centroids.row(assignment[static_cast<std::size_t>(i)])).squaredNorm();
  }
  return total;
}

namespace {

// Nearest centroid for every row (ties to the smaller centroid id) and the
// squared distance to it.
void assign(const Matrix& xt, const Matrix& ct, std::vector<Index>& assignment,
            std::vector<double>& dist2) {
  const Index d = xt.rows();
  for (Index i = 0; i < xt.cols(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    Index best_c = 0;
    for (Index c = 0; c < ct.cols(); ++c) {
      const double v = sq_dist(xt.col(i).data(), ct.col(c).data(), d);
      if (v < best) {
        best = v;
        best_c = c;
      }
    }
    assignment[static_cast<std::size_t>(i)] = best_c;
    dist2[static_cast<std::size_t>(i)] = best;
  }
}

}  // namespace

KMeansResult kmeans_detailed(const Matrix& x, Index m, std::uint64_t seed,
                             const KMeansOptions& options) {
  const Index n = x.rows();
  const Index d = x.cols();
  detail::require(m >= 1, "kmeans: m must be >= 1");
  detail::require(m <= n, "kmeans: m (" + std::to_string(m) +
                              ") exceeds number of points (" + std::to_string(n) + ")");
  detail::require(x.allFinite(), "kmeans: input must be finite");

  const Matrix xt = x.transpose();
  Rng rng(seed);

  // k-means++ seeding.
  Matrix ct(d, m);
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);
  std::vector<double> nearest(static_cast<std::size_t>(n),
                              std::numeric_limits<double>::infinity());
  Index pick = static_cast<Index>(rng.index(static_cast<std::uint64_t>(n)));
  for (Index c = 0; c < m; ++c) {
    if (c > 0) {
      double total = 0.0;
      for (Index i = 0; i < n; ++i) total += nearest[static_cast<std::size_t>(i)];
      pick = -1;
      if (total > 0.0) {
        const double target = rng.uniform() * total;
        double cumulative = 0.0;
        for (Index i = 0; i < n; ++i) {
          const double w = nearest[static_cast<std::size_t>(i)];
          if (w <= 0.0) continue;
          cumulative += w;
          pick = i;
          if (cumulative > target) break;
        }
      }
      if (pick < 0) {
        // Every point coincides with a chosen centroid.
        for (Index i = 0; i < n; ++i) {
          if (!chosen[static_cast<std::size_t>(i)]) {
            pick = i;
            break;
          }
        }
      }
    }
    chosen[static_cast<std::size_t>(pick)] = true;
    ct.col(c) = xt.col(pick);
    for (Index i = 0; i < n; ++i) {
      const double v = sq_dist(xt.col(i).data(), ct.col(c).data(), d);
      auto& slot = nearest[static_cast<std::size_t>(i)];
      slot = std::min(slot, v);
    }
  }

  double scale = 0.0;
  for (Index k = 0; k < d; ++k) scale = std::max(scale, x.col(k).maxCoeff() - x.col(k).minCoeff());
  if (scale <= 0.0) scale = 1.0;
  const double move_tol = options.tolerance * scale;

  KMeansResult result;
  result.assignment.assign(static_cast<std::size_t>(n), 0);
  std::vector<double> dist2(static_cast<std::size_t>(n), 0.0);
  assign(xt, ct, result.assignment, dist2);
  {
    double total = 0.0;
    for (double v : dist2) total += v;
    result.wcss_trace.push_back(total);
  }

  Matrix sums(d, m);
  std::vector<Index> counts(static_cast<std::size_t>(m));
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (iter > 0) assign(xt, ct, result.assignment, dist2);
    sums.setZero();
    std::fill(counts.begin(), counts.end(), 0);
    for (Index i = 0; i < n; ++i) {
      const Index c = result.assignment[static_cast<std::size_t>(i)];
      sums.col(c) += xt.col(i);
      ++counts[static_cast<std::size_t>(c)];
    }
    double max_move = 0.0;
    for (Index c = 0; c < m; ++c) {
      Vector updated;
      if (counts[static_cast<std::size_t>(c)] > 0) {
        updated = sums.col(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      } else {
        // Re-seed at the point farthest from its own centroid.
        Index far = 0;
        double far_d = -1.0;
        for (Index i = 0; i < n; ++i) {
          if (dist2[static_cast<std::size_t>(i)] > far_d) {
            far_d = dist2[static_cast<std::size_t>(i)];
            far = i;
          }
        }
        dist2[static_cast<std::size_t>(far)] = -1.0;
        updated = xt.col(far);
      }
      max_move = std::max(max_move, (updated - ct.col(c)).norm());
      ct.col(c) = updated;
    }
    result.iterations = iter + 1;
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
      total += sq_dist(xt.col(i).data(),
                       ct.col(result.assignment[static_cast<std::size_t>(i)]).data(), d);
    }
    result.wcss_trace.push_back(total);
    if (max_move < move_tol) break;
  }
  // Final assignment against the final centroids.
  assign(xt, ct, result.assignment, dist2);
  result.centroids = ct.transpose();
  return result;
}

InducingSet kmeans(const Matrix& x, Index m, std::uint64_t seed) {
  return InducingSet(kmeans_detailed(x, m, seed).centroids);
}

}  // namespace gpdistill
