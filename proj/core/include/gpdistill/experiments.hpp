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

#ifndef GPDISTILL_EXPERIMENTS_HPP_
#define GPDISTILL_EXPERIMENTS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gpdistill/baselines.hpp"
#include "gpdistill/csv.hpp"
#include "gpdistill/distillation.hpp"
#include "gpdistill/exact_gp.hpp"
#include "gpdistill/metrics.hpp"
#include "gpdistill/prediction.hpp"

namespace gpdistill {

inline constexpr int kReportSchemaVersion = 1;

enum class Experiment { kReconstruct, kToy1d, kBench, kSweepB };

std::string to_string(Experiment e);
Experiment experiment_from_string(const std::string& name);

// Where bench / sweep-b data comes from: a CSV file, or one of the built-in
// generators ("correlated_rbf", "gp1d", "toy1d").
struct DataSource {
  std::string path;
  std::string target = "y";
  std::string synthetic = "correlated_rbf";
  Index n = 4000;  // total rows drawn by a generator
  Index d = 8;
  double noise_sd = 0.3;
  double lengthscale = 2.0;  // gp1d only
  double split = 0.5;
  bool standardize = true;
};

// Teacher hyperparameter fit: Adam on the log marginal likelihood of the
// first `subset` training rows, then an exact model on all of them.
struct TeacherConfig {
  KernelFamily family = KernelFamily::kArd;
  std::optional<std::vector<double>> lengthscales;  // initial; default all 1
  double noise_variance = 0.1;                      // initial
  int steps = 100;
  double learning_rate = 0.05;
  Index subset = 600;
};

struct RunConfig {
  Experiment experiment = Experiment::kBench;
  std::uint64_t seed = 0;
  DataSource data;
  std::vector<std::string> methods{"exact", "sor", "fitc", "kiss1d", "distill"};
  TeacherConfig teacher;
  DistillConfig distill;
  Index sor_m = 200;
  Index fitc_m = 200;
  Index kiss_grid = 400;

  // Kernel reconstruction.
  Index recon_n = 1000;
  double recon_lengthscale = 10.0;
  std::vector<Index> b_list;

  // Toy 1-D.
  Index toy_n = 1000;
  Index test_grid = 201;

  // Timing (bench only).
  bool timing = true;
  Index timing_points = 1000;
  int timing_repetitions = 5;

  // Full-scale defaults for each experiment.
  static RunConfig defaults(Experiment e);
  // Starts from defaults(experiment) and overrides the keys present.
  static RunConfig from_json(const std::string& text);
  static RunConfig from_file(const std::string& path);
  std::string to_json() const;
  void validate() const;
};

// Loads or generates the data described by cfg.data.
TrainTest load_data(const RunConfig& cfg);

ExactGPModel train_teacher(const Dataset& train, const TeacherConfig& cfg);

struct MethodResult {
  std::string method;
  bool ok = true;
  std::string error;
  double smse = 0.0;           // original target units
  double mean_rmse = 0.0;      // vs exact, standardized units
  double variance_rmse = 0.0;  // vs exact, standardized units
  Index clamped = 0;
  std::optional<double> seconds_per_point;
  Prediction prediction;  // standardized units
};

struct ReconstructionResult {
  Index n = 0;
  double lengthscale = 0.0;
  double distill_init_error = 0.0;
  double distill_error = 0.0;
  double sor_error = 0.0;
  double kiss_error = 0.0;
  AbsErrorSummary distill_abs;
  AbsErrorSummary sor_abs;
  AbsErrorSummary kiss_abs;
  std::vector<std::pair<Index, double>> b_curve;
  std::vector<IterationRecord> distill_log;
};

struct Toy1dResult {
  KernelSpec teacher_spec;
  Standardization scaling;
  Vector grid;
  Vector truth;
  std::vector<MethodResult> methods;  // exact, distill, kiss1d
  std::vector<IterationRecord> distill_log;
};

struct BenchResult {
  KernelSpec teacher_spec;
  Index n_train = 0;
  Index n_test = 0;
  Index dim = 0;
  double mean_predictor_smse = 0.0;  // harness self-test, exactly 1
  std::vector<MethodResult> methods;
  std::vector<IterationRecord> distill_log;
};

struct SweepPoint {
  Index b = 0;
  double smse = 0.0;
  double variance_rmse = 0.0;
  double objective = 0.0;
};

struct SweepResult {
  KernelSpec teacher_spec;
  double exact_smse = 0.0;
  std::optional<double> kiss_variance_rmse;  // 1-D data only
  std::vector<SweepPoint> points;
};

ReconstructionResult run_reconstruction(const RunConfig& cfg);
Toy1dResult run_toy1d(const RunConfig& cfg);
BenchResult run_benchmark(const RunConfig& cfg);
SweepResult run_sweep_b(const RunConfig& cfg);

const MethodResult* find_method(const std::vector<MethodResult>& methods,
                                const std::string& name);

// Versioned JSON plus CSV sidecars for curves. Everything except the
// optional "timing" block is a pure function of (config, seed).
struct Report {
  std::string json;
  std::vector<std::pair<std::string, CsvTable>> sidecars;
};

Report make_report(const RunConfig& cfg, const ReconstructionResult& r);
Report make_report(const RunConfig& cfg, const Toy1dResult& r);
Report make_report(const RunConfig& cfg, const BenchResult& r);
Report make_report(const RunConfig& cfg, const SweepResult& r);

// Runs cfg.experiment and builds its report.
Report run_experiment(const RunConfig& cfg);

// Writes the JSON to `path` and each sidecar next to it as
// <stem>.<name>.csv.
void write_report(const Report& report, const std::string& path);

// Shortest round-trip decimal form, used for every number in CSV output.
std::string format_double(double v);

}  // namespace gpdistill

#endif  // GPDISTILL_EXPERIMENTS_HPP_
