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

#include "gpdistill/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gpdistill/error.hpp"

namespace gpdistill {

namespace {
constexpr Index kFourierFeatures = 400;
constexpr Index kLatentRank = 3;
}  // namespace

Vector reconstruction_inputs(Index n, std::uint64_t seed) {
  detail::require(n >= 1, "reconstruction_inputs: n must be positive");
  Rng rng(seed);
  Vector x(n);
  for (Index i = 0; i < n; ++i) x(i) = rng.normal(0.0, 5.0);
  std::sort(x.data(), x.data() + n);
  return x;
}

double toy1d_signal(double x) { return std::sin(x) * std::exp(-x * x / 50.0); }

SyntheticData toy1d(Index n, std::uint64_t seed) {
  detail::require(n >= 2, "toy1d: n must be at least 2");
  Rng rng(seed);
  SyntheticData out{Matrix(n, 1), Vector(n)};
  for (Index i = 0; i < n; ++i) out.x(i, 0) = rng.uniform(-10.0, 10.0);
  for (Index i = 0; i < n; ++i) out.y(i) = toy1d_signal(out.x(i, 0)) + rng.normal();
  return out;
}

RandomFourierFunction::RandomFourierFunction(const std::vector<double>& lengthscales,
                                             Index features, Rng& rng) {
  detail::require(!lengthscales.empty() && features >= 1,
                  "RandomFourierFunction: need lengthscales and features");
  const auto d = static_cast<Index>(lengthscales.size());
  frequencies_.resize(features, d);
  for (Index k = 0; k < features; ++k) {
    for (Index j = 0; j < d; ++j) {
      frequencies_(k, j) = rng.normal() / lengthscales[static_cast<std::size_t>(j)];
    }
  }
  phases_.resize(features);
  for (Index k = 0; k < features; ++k) phases_(k) = rng.uniform(0.0, 2.0 * std::numbers::pi);
  amplitudes_.resize(features);
  for (Index k = 0; k < features; ++k) amplitudes_(k) = rng.normal();
}

double RandomFourierFunction::operator()(const Eigen::Ref<const Vector>& x) const {
  detail::require(x.size() == frequencies_.cols(), "RandomFourierFunction: dimension mismatch");
  double total = 0.0;
  for (Index k = 0; k < frequencies_.rows(); ++k) {
    double phase = phases_(k);
    for (Index j = 0; j < x.size(); ++j) phase += frequencies_(k, j) * x(j);
    total += amplitudes_(k) * std::cos(phase);
  }
  return std::sqrt(2.0 / static_cast<double>(frequencies_.rows())) * total;
}

Vector RandomFourierFunction::evaluate(const Matrix& x) const {
  Vector out(x.rows());
  for (Index i = 0; i < x.rows(); ++i) out(i) = (*this)(x.row(i).transpose());
  return out;
}

SyntheticData correlated_rbf(Index n, Index d, double noise_sd, std::uint64_t seed) {
  detail::require(n >= 2 && d >= 1, "correlated_rbf: need n >= 2 and d >= 1");
  detail::require(noise_sd >= 0.0, "correlated_rbf: noise sd must be non-negative");
  Rng rng(seed);
  Matrix z(n, kLatentRank);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < kLatentRank; ++j) z(i, j) = rng.normal();
  }
  Matrix mixing(kLatentRank, d);
  for (Index i = 0; i < kLatentRank; ++i) {
    for (Index j = 0; j < d; ++j) mixing(i, j) = rng.normal();
  }
  Matrix x = z * mixing;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) x(i, j) += 0.3 * rng.normal();
  }
  for (Index j = 0; j < d; ++j) {
    const double mean = x.col(j).mean();
    const double sd = std::sqrt((x.col(j).array() - mean).square().mean());
    x.col(j) = (x.col(j).array() - mean) / sd;
  }

  std::vector<double> lengthscales(static_cast<std::size_t>(d));
  for (Index j = 0; j < d; ++j) {
    lengthscales[static_cast<std::size_t>(j)] =
        d == 1 ? 1.5 : 1.5 + 2.5 * static_cast<double>(j) / static_cast<double>(d - 1);
  }
  const RandomFourierFunction f(lengthscales, kFourierFeatures, rng);
  SyntheticData out{std::move(x), Vector()};
  out.y = f.evaluate(out.x);
  for (Index i = 0; i < n; ++i) out.y(i) += noise_sd * rng.normal();
  return out;
}

SyntheticData gp_draw_1d(Index n, double lengthscale, double noise_sd, std::uint64_t seed) {
  detail::require(n >= 2 && lengthscale > 0.0 && noise_sd >= 0.0,
                  "gp_draw_1d: invalid arguments");
  Rng rng(seed);
  SyntheticData out{Matrix(n, 1), Vector()};
  for (Index i = 0; i < n; ++i) out.x(i, 0) = rng.uniform(-10.0, 10.0);
  const RandomFourierFunction f({lengthscale}, kFourierFeatures, rng);
  out.y = f.evaluate(out.x);
  for (Index i = 0; i < n; ++i) out.y(i) += noise_sd * rng.normal();
  return out;
}

}  // namespace gpdistill
