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

#include "gpdistill/distillation.hpp"

#include <cmath>
#include <string>

#include "gpdistill/error.hpp"

namespace gpdistill {

void DistillConfig::validate() const {
  detail::require(b >= 1, "DistillConfig: b must be at least 1");
  detail::require(m >= 1, "DistillConfig: m must be at least 1");
  detail::require(b <= m, "DistillConfig: b must not exceed m");
  detail::require(iterations >= 0, "DistillConfig: iterations must be non-negative");
  detail::require(!eta || (*eta > 0.0 && std::isfinite(*eta)),
                  "DistillConfig: step size must be positive");
}

namespace {

// Residual E = W K_UU W^T - K_XX, built column by column from P = W K_UU.
Matrix residual(const Matrix& k_xx, const SparseWeights& w, const Matrix& p) {
  const Index n = w.rows();
  Matrix e = -k_xx;
  for (Index k = 0; k < n; ++k) {
    const auto s = w.support(k);
    const auto v = w.values(k);
    for (std::size_t c = 0; c < s.size(); ++c) e.col(k) += v[c] * p.col(s[c]);
  }
  return e;
}

void check_shapes(const Matrix& k_xx, const SparseWeights& w, const Matrix& k_uu) {
  detail::require(k_xx.rows() == w.rows() && k_xx.cols() == w.rows(),
                  "distillation: K_XX must be n x n");
  detail::require(k_uu.rows() == w.cols() && k_uu.cols() == w.cols(),
                  "distillation: K_UU must be m x m");
}

// Gradient restricted to the supports, given E and P.
SparseWeights support_gradient(const Matrix& e, const Matrix& p, const SparseWeights& w,
                               GradientMode mode) {
  SparseWeights g = w;
  for (Index i = 0; i < w.rows(); ++i) {
    const auto s = w.support(i);
    auto out = g.values(i);
    for (std::size_t c = 0; c < s.size(); ++c) {
      // E is symmetric, so row i of E P is column i of E against P.
      const double dot = e.col(i).dot(p.col(s[c]));
      out[c] = mode == GradientMode::kAnalyticFnorm ? 4.0 * dot
                                                    : dot + e(i, i) * p(i, s[c]);
    }
  }
  return g;
}

struct Evaluation {
  Matrix p;
  Matrix e;
  double value = 0.0;
};

Evaluation evaluate(const Matrix& k_xx, const SparseWeights& w, const Matrix& k_uu) {
  Evaluation ev;
  ev.p = w.times(k_uu);
  ev.e = residual(k_xx, w, ev.p);
  ev.value = ev.e.norm();
  return ev;
}

[[noreturn]] void diverged(int iteration, double step) {
  throw NumericalError("distillation objective became non-finite at iteration " +
                       std::to_string(iteration) + " (step " + std::to_string(step) +
                       "); retry with a smaller step size");
}

}  // namespace

SparseWeights init_weights(const Matrix& k_xu, const Matrix& k_uu,
                           const InducingSet& inducing, const Matrix& x, Index b) {
  const Index n = x.rows();
  const Index m = inducing.size();
  detail::require(b >= 1 && b <= m, "init_weights: need 1 <= b <= m");
  detail::require(k_xu.rows() == n && k_xu.cols() == m, "init_weights: K_XU must be n x m");
  detail::require(k_uu.rows() == m && k_uu.cols() == m, "init_weights: K_UU must be m x m");
  detail::require(x.cols() == inducing.dim(), "init_weights: dimension mismatch");

  std::vector<std::vector<Index>> supports(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    supports[static_cast<std::size_t>(i)] = knn(inducing, x.row(i).transpose(), b).indices;
  }
  SparseWeights w(m, supports);
  for (Index i = 0; i < n; ++i) {
    const auto s = w.support(i);
    // Row form beta K_UU(J, :) ~ (K_XU)_i is the column system K_UU(:, J) beta^T.
    Matrix a(m, static_cast<Index>(s.size()));
    for (std::size_t c = 0; c < s.size(); ++c) a.col(static_cast<Index>(c)) = k_uu.col(s[c]);
    const Vector beta = least_squares(a, k_xu.row(i).transpose());
    auto v = w.values(i);
    for (std::size_t c = 0; c < s.size(); ++c) v[c] = beta(static_cast<Index>(c));
  }
  return w;
}

double objective(const Matrix& k_xx, const SparseWeights& w, const Matrix& k_uu) {
  check_shapes(k_xx, w, k_uu);
  return evaluate(k_xx, w, k_uu).value;
}

Matrix gradient(const Matrix& k_xx, const SparseWeights& w, const Matrix& k_uu,
                GradientMode mode) {
  check_shapes(k_xx, w, k_uu);
  const Matrix p = w.times(k_uu);
  Matrix e = residual(k_xx, w, p);
  if (mode == GradientMode::kAnalyticFnorm) return 4.0 * (e * p);
  e.diagonal() *= 2.0;
  return e.transpose() * p;
}

SparseWeights project_rows(const Matrix& g, const SparseWeights& supports) {
  return supports.with_values_from(g);
}

SparseWeights projected_gradient(const Matrix& k_xx, const SparseWeights& w,
                                 const Matrix& k_uu, GradientMode mode) {
  check_shapes(k_xx, w, k_uu);
  const Evaluation ev = evaluate(k_xx, w, k_uu);
  return support_gradient(ev.e, ev.p, w, mode);
}

KernelDistillation distill_kernel(const KernelSpec& spec, const Matrix& x,
                                  const InducingSet& inducing, const DistillConfig& cfg) {
  cfg.validate();
  spec.check_dimension(x.cols());
  const Index n = x.rows();
  detail::require(n <= kMaxDenseTrainingPoints,
                  "distill: n exceeds the dense K_XX limit of " +
                      std::to_string(kMaxDenseTrainingPoints));
  detail::require(inducing.size() == cfg.m, "distill: inducing set size must equal m");
  detail::require(inducing.dim() == x.cols(), "distill: inducing dimension mismatch");

  KernelDistillation out;
  out.k_uu = kernel_matrix(spec, inducing.points());
  out.weights = init_weights(kernel_matrix(spec, x, inducing.points()), out.k_uu, inducing,
                             x, cfg.b);
  out.weights.check(cfg.b);
  if (cfg.iterations == 0 && !cfg.track_objective) return out;

  const Matrix k_xx = kernel_matrix(spec, x);
  Evaluation current = evaluate(k_xx, out.weights, out.k_uu);
  if (!std::isfinite(current.value)) diverged(0, 0.0);
  out.log.push_back({0, current.value, 0.0, 0});

  const double base_eta =
      cfg.eta.value_or(1e-4 * static_cast<double>(n) / out.k_uu.norm());
  double trial = base_eta;
  SparseWeights& w = out.weights;
  for (int it = 1; it <= cfg.iterations; ++it) {
    const SparseWeights g = support_gradient(current.e, current.p, w, cfg.gradient_mode);

    if (!cfg.line_search) {
      w.axpy(-base_eta, g);
      w.check(cfg.b);
      current = evaluate(k_xx, w, out.k_uu);
      if (!std::isfinite(current.value)) diverged(it, base_eta);
      out.log.push_back({it, current.value, base_eta, 0});
      continue;
    }

    // Backtracking from twice the last accepted step; accept on decrease.
    double step = 2.0 * trial;
    bool accepted = false;
    int backtracks = 0;
    for (; backtracks <= 30; ++backtracks, step *= 0.5) {
      SparseWeights candidate = w;
      candidate.axpy(-step, g);
      Evaluation ev = evaluate(k_xx, candidate, out.k_uu);
      if (std::isfinite(ev.value) && ev.value < current.value) {
        w = std::move(candidate);
        current = std::move(ev);
        accepted = true;
        break;
      }
    }
    w.check(cfg.b);
    if (!accepted) break;  // no descent along the projected gradient
    trial = step;
    out.log.push_back({it, current.value, step, backtracks});
  }
  return out;
}

DistillResult distill_with_inducing(const ExactGPModel& teacher, const InducingSet& inducing,
                                    const DistillConfig& cfg) {
  const Dataset& data = teacher.data();
  KernelDistillation kd = distill_kernel(teacher.spec(), data.x, inducing, cfg);
  const Precomputed pre =
      precompute(data, kd.weights, kd.k_uu, teacher.spec().noise_variance);

  DistillResult out;
  DistilledModel& model = out.model;
  model.inducing = inducing;
  model.spec = teacher.spec();
  model.b = cfg.b;
  model.k_uu = std::move(kd.k_uu);
  model.alpha_tilde = pre.alpha_tilde;
  model.v = pre.v;
  model.scaling = data.scaling;
  model.system = cfg.test_system;
  model.weights = std::move(kd.weights);
  out.log = std::move(kd.log);
  return out;
}

DistillResult distill(const ExactGPModel& teacher, const DistillConfig& cfg,
                      std::uint64_t seed) {
  cfg.validate();
  detail::require(cfg.m <= teacher.data().size(), "distill: m must not exceed n");
  return distill_with_inducing(teacher, kmeans(teacher.data().x, cfg.m, seed), cfg);
}

std::vector<std::pair<Index, double>> error_vs_sparsity(const KernelSpec& spec,
                                                        const Matrix& x,
                                                        const InducingSet& inducing,
                                                        const DistillConfig& cfg,
                                                        const std::vector<Index>& b_list) {
  for (std::size_t i = 1; i < b_list.size(); ++i) {
    detail::require(b_list[i - 1] <= b_list[i], "error_vs_sparsity: b list must be ascending");
  }
  std::vector<std::pair<Index, double>> out;
  DistillConfig run = cfg;
  run.track_objective = true;
  for (Index b : b_list) {
    run.b = b;
    out.emplace_back(b, distill_kernel(spec, x, inducing, run).final_objective());
  }
  return out;
}

std::vector<std::pair<Index, double>> error_vs_sparsity(const ExactGPModel& teacher,
                                                        const DistillConfig& cfg,
                                                        const std::vector<Index>& b_list,
                                                        std::uint64_t seed) {
  cfg.validate();
  const InducingSet inducing = kmeans(teacher.data().x, cfg.m, seed);
  return error_vs_sparsity(teacher.spec(), teacher.data().x, inducing, cfg, b_list);
}

}  // namespace gpdistill
