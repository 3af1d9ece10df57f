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

#ifndef GPDISTILL_SYNTHETIC_HPP_
#define GPDISTILL_SYNTHETIC_HPP_

#include <cstdint>
#include <vector>

#include "gpdistill/linalg.hpp"
#include "gpdistill/random.hpp"

namespace gpdistill {

struct SyntheticData {
  Matrix x;
  Vector y;
};

// n sorted draws from N(0, 25), the kernel-reconstruction input set.
Vector reconstruction_inputs(Index n, std::uint64_t seed);

// sin(x) exp(-x^2 / 50), the noise-free toy signal.
double toy1d_signal(double x);

// x ~ U[-10, 10], y = toy1d_signal(x) + N(0, 1).
SyntheticData toy1d(Index n, std::uint64_t seed);

// Sample path of a unit-amplitude squared-exponential GP approximated with
// random Fourier features: f(x) = sqrt(2/F) sum_k a_k cos(w_k . x + p_k),
// w_k ~ N(0, diag(1/l^2)), p_k ~ U[0, 2 pi), a_k ~ N(0, 1).
class RandomFourierFunction {
 public:
  RandomFourierFunction(const std::vector<double>& lengthscales, Index features, Rng& rng);

  double operator()(const Eigen::Ref<const Vector>& x) const;
  Vector evaluate(const Matrix& x) const;

 private:
  Matrix frequencies_;  // F x d
  Vector phases_;
  Vector amplitudes_;
};

// Correlated d-dimensional inputs X = Z A + 0.3 E with a rank-3 latent Z,
// columns standardized, and y an ARD GP path (lengthscales evenly spaced
// over [1.5, 4]) plus N(0, noise_sd^2).
SyntheticData correlated_rbf(Index n, Index d, double noise_sd, std::uint64_t seed);

// x ~ U[-10, 10] and y an RBF GP path with the given lengthscale plus noise.
SyntheticData gp_draw_1d(Index n, double lengthscale, double noise_sd, std::uint64_t seed);

}  // namespace gpdistill

#endif  // GPDISTILL_SYNTHETIC_HPP_
