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

// Per-point prediction latency of the distilled model against FITC and the
// exact GP.

#include <benchmark/benchmark.h>

#include <map>
#include <memory>

#include "gpdistill/baselines.hpp"
#include "gpdistill/distillation.hpp"
#include "gpdistill/exact_gp.hpp"
#include "gpdistill/fast_inference.hpp"
#include "gpdistill/random.hpp"

namespace gpdistill {
namespace {

constexpr Index kTrain = 2000;
constexpr Index kQueries = 256;

struct Fixture {
  Dataset data;
  Matrix queries;
  KernelSpec spec = KernelSpec::ard({0.6, 0.6}, 0.1);

  Fixture() {
    Rng rng(1);
    Matrix x(kTrain, 2);
    Vector y(kTrain);
    for (Index i = 0; i < kTrain; ++i) {
      x.row(i) << rng.uniform(-3, 3), rng.uniform(-3, 3);
      y(i) = std::sin(x(i, 0)) * std::cos(x(i, 1)) + 0.1 * rng.normal();
    }
    data = Dataset::from_standardized(std::move(x), std::move(y));
    queries.resize(kQueries, 2);
    for (Index i = 0; i < kQueries; ++i) queries.row(i) << rng.uniform(-3, 3), rng.uniform(-3, 3);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

const DistilledModel& distilled(Index m, Index b) {
  static std::map<std::pair<Index, Index>, std::unique_ptr<DistilledModel>> cache;
  auto& slot = cache[{m, b}];
  if (!slot) {
    const Fixture& f = fixture();
    DistillConfig cfg;
    cfg.m = m;
    cfg.b = b;
    cfg.iterations = 0;
    cfg.track_objective = false;
    KernelDistillation kd = distill_kernel(f.spec, f.data.x, InducingSet(f.data.x.topRows(m)), cfg);
    const Precomputed pre = precompute(f.data, kd.weights, kd.k_uu, f.spec.noise_variance);
    slot = std::make_unique<DistilledModel>();
    slot->inducing = InducingSet(f.data.x.topRows(m));
    slot->spec = f.spec;
    slot->b = b;
    slot->k_uu = std::move(kd.k_uu);
    slot->alpha_tilde = pre.alpha_tilde;
    slot->v = pre.v;
  }
  return *slot;
}

void BM_DistilledPredict(benchmark::State& state) {
  const DistilledModel& model = distilled(state.range(0), state.range(1));
  const Matrix& q = fixture().queries;
  Index i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(predict_point(model, q.row(i).transpose()));
    i = (i + 1) % kQueries;
  }
}
BENCHMARK(BM_DistilledPredict)
    ->ArgsProduct({{64, 256, 1024, 2000}, {10}})
    ->ArgsProduct({{256}, {5, 20, 40}});

void BM_FitcPredict(benchmark::State& state) {
  const Fixture& f = fixture();
  const Index m = state.range(0);
  const SorFitcModel model =
      fit_sor_fitc(f.data, f.spec, InducingSet(f.data.x.topRows(m)), InducingVariant::kFitc);
  Index i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(predict_sor_fitc(model, Matrix(f.queries.row(i))));
    i = (i + 1) % kQueries;
  }
}
BENCHMARK(BM_FitcPredict)->Arg(64)->Arg(256)->Arg(1024);

void BM_ExactPredict(benchmark::State& state) {
  const Fixture& f = fixture();
  const ExactGPModel model(f.data, f.spec);
  Index i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(predict_exact(model, Matrix(f.queries.row(i))));
    i = (i + 1) % kQueries;
  }
}
BENCHMARK(BM_ExactPredict);

}  // namespace
}  // namespace gpdistill

BENCHMARK_MAIN();
