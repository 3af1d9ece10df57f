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

// gpdistill command-line tool: train a teacher, distill it, predict from a
// bundle, and run the scripted experiments.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
// 1 anything else.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "gpdistill/csv.hpp"
#include "gpdistill/distillation.hpp"
#include "gpdistill/error.hpp"
#include "gpdistill/exact_gp.hpp"
#include "gpdistill/experiments.hpp"
#include "gpdistill/fast_inference.hpp"
#include "gpdistill/serialization.hpp"

namespace {

using namespace gpdistill;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct TrainArgs {
  std::string data;
  std::string target;
  std::string out;
  std::string family = "ard";
  double noise = 0.1;
  int steps = 100;
  double learning_rate = 0.05;
  long long subset = 600;
  bool raw = false;
  std::uint64_t seed = 0;
};

struct DistillArgs {
  std::string model;
  std::string out;
  std::string mode = "analytic";
  std::string system = "square";
  std::string log;
  long long m = 100;
  long long b = 10;
  double eta = 0.0;
  int iterations = 100;
  bool no_line_search = false;
  std::uint64_t seed = 0;
};

struct PredictArgs {
  std::string model;
  std::string data;
  std::string target;
  std::string out;
  std::uint64_t seed = 0;
};

struct ExperimentArgs {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
};

int run_train(const TrainArgs& a) {
  Dataset data = load_csv_dataset(a.data, a.target, !a.raw);
  TeacherConfig tc;
  tc.family = kernel_family_from_string(a.family);
  tc.noise_variance = a.noise;
  tc.steps = a.steps;
  tc.learning_rate = a.learning_rate;
  tc.subset = static_cast<Index>(a.subset);
  // Hyperparameters are fitted on a seeded subset so large files stay cheap.
  if (a.subset < data.size()) {
    const TrainTest shuffled = split_dataset(data.x, data.y, 0.5, false, a.seed);
    Matrix x(data.size(), data.dim());
    x << shuffled.train.x, shuffled.test.x;
    Vector y(data.size());
    y << shuffled.train.y, shuffled.test.y;
    data.x = std::move(x);
    data.y = std::move(y);
  }
  const ExactGPModel model = train_teacher(data, tc);
  save_exact(a.out, model);
  std::cout << "trained exact GP on " << data.size() << " points, kernel "
            << to_string(model.spec().family) << ", noise " << model.spec().noise_variance
            << "\n";
  return 0;
}

int run_distill(const DistillArgs& a, bool eta_given) {
  const ExactGPModel teacher = load_exact(a.model);
  DistillConfig cfg;
  cfg.m = static_cast<Index>(a.m);
  cfg.b = static_cast<Index>(a.b);
  cfg.iterations = a.iterations;
  cfg.line_search = !a.no_line_search;
  if (eta_given) cfg.eta = a.eta;
  if (a.mode == "analytic") {
    cfg.gradient_mode = GradientMode::kAnalyticFnorm;
  } else if (a.mode == "paper") {
    cfg.gradient_mode = GradientMode::kPaperAlg1;
  } else {
    throw ConfigError("--mode must be 'analytic' or 'paper'");
  }
  if (a.system == "square") {
    cfg.test_system = TestWeightSystem::kSquare;
  } else if (a.system == "rows") {
    cfg.test_system = TestWeightSystem::kRows;
  } else {
    throw ConfigError("--test-system must be 'square' or 'rows'");
  }
  try {
    cfg.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
  if (cfg.m > teacher.data().size()) throw ConfigError("--m exceeds the training size");

  const DistillResult result = distill(teacher, cfg, a.seed);
  save_distilled(a.out, result.model);
  if (!a.log.empty()) {
    CsvTable t;
    t.header = {"iteration", "objective", "step_size", "backtracks"};
    for (const auto& r : result.log) {
      t.rows.push_back({std::to_string(r.iteration), format_double(r.objective),
                        format_double(r.step_size), std::to_string(r.backtracks)});
    }
    write_csv(a.log, t);
  }
  if (!result.log.empty()) {
    std::cout << "objective " << result.log.front().objective << " -> "
              << result.log.back().objective << " after " << result.log.back().iteration
              << " iterations\n";
  }
  std::cout << "wrote inference bundle (" << inference_bundle_bytes(result.model)
            << " bytes)\n";
  return 0;
}

int run_predict(const PredictArgs& a) {
  CsvTable table = read_csv(a.data);
  std::vector<std::size_t> skip;
  if (!a.target.empty()) skip.push_back(table.column(a.target));
  const Matrix raw = numeric_matrix(table, skip);

  CsvTable out;
  out.header = {"mean", "variance", "clamped"};
  const std::string format = detect_model_format(a.model);
  if (format == "GPDISTIL1") {
    const DistilledModel model = load_distilled(a.model);
    if (raw.cols() != model.inducing.dim()) {
      throw ConfigError("data has " + std::to_string(raw.cols()) + " feature columns, model expects " +
                        std::to_string(model.inducing.dim()));
    }
    const Matrix x = model.scaling.transform_features(raw);
    const double sd = model.scaling.target_sd;
    for (const auto& p : predict_batch(model, x)) {
      out.rows.push_back({format_double(p.mean * sd + model.scaling.target_mean),
                          format_double(p.variance * sd * sd), p.clamped ? "1" : "0"});
    }
  } else if (format == "GPEXACT1") {
    const ExactGPModel model = load_exact(a.model);
    const Standardization& s = model.data().scaling;
    if (raw.cols() != model.data().dim()) throw ConfigError("feature count does not match model");
    Prediction p = predict_exact(model, s.transform_features(raw));
    // Clamped rows are exactly the ones predict_exact set to zero.
    const Vector mean = s.inverse_target(p.mean);
    const Vector var = s.inverse_variance(p.variance);
    for (Index i = 0; i < mean.size(); ++i) {
      out.rows.push_back({format_double(mean(i)), format_double(var(i)),
                          p.clamped > 0 && p.variance(i) == 0.0 ? "1" : "0"});
    }
  } else {
    throw ConfigError("'" + a.model + "' is not a gpdistill model file");
  }
  write_csv(a.out, out);
  std::cout << "wrote " << out.rows.size() << " predictions\n";
  return 0;
}

int run_named_experiment(Experiment e, const ExperimentArgs& a, bool seed_given) {
  RunConfig cfg = a.config.empty() ? RunConfig::defaults(e) : RunConfig::from_file(a.config);
  if (cfg.experiment != e) {
    throw ConfigError("config is for experiment '" + to_string(cfg.experiment) +
                      "', not '" + to_string(e) + "'");
  }
  if (seed_given) cfg.seed = a.seed;
  const Report report = run_experiment(cfg);
  write_report(report, a.out);
  std::cout << "wrote " << a.out << " and " << report.sidecars.size() << " CSV sidecar(s)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact GP teachers, kernel distillation and fast sparse prediction"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Fit an exact GP teacher on a CSV file");
  train_cmd->add_option("--data", train.data, "Input CSV with header")->required();
  train_cmd->add_option("--target", train.target, "Target column name")->required();
  train_cmd->add_option("--out", train.out, "Teacher model file")->required();
  train_cmd->add_option("--kernel", train.family, "rbf or ard");
  train_cmd->add_option("--noise", train.noise, "Initial noise variance");
  train_cmd->add_option("--steps", train.steps, "Adam steps on the marginal likelihood");
  train_cmd->add_option("--lr", train.learning_rate, "Adam learning rate");
  train_cmd->add_option("--subset", train.subset, "Rows used for hyperparameter fitting");
  train_cmd->add_flag("--no-standardize", train.raw, "Keep raw feature and target units");
  train_cmd->add_option("--seed", train.seed, "Random seed");

  DistillArgs dist;
  auto* distill_cmd = app.add_subcommand("distill", "Distill a teacher into an inference bundle");
  distill_cmd->add_option("--model", dist.model, "Teacher model file")->required();
  distill_cmd->add_option("--out", dist.out, "Inference bundle")->required();
  distill_cmd->add_option("--m", dist.m, "Inducing points");
  distill_cmd->add_option("--b", dist.b, "Non-zeros per row of W");
  distill_cmd->add_option("--mode", dist.mode, "analytic or paper gradient");
  auto* eta_opt = distill_cmd->add_option("--eta", dist.eta, "Step size");
  distill_cmd->add_option("--iters", dist.iterations, "Gradient iterations");
  distill_cmd->add_flag("--no-line-search", dist.no_line_search, "Take fixed steps of size eta");
  distill_cmd->add_option("--test-system", dist.system, "square (b x b) or rows (b x m)");
  distill_cmd->add_option("--log", dist.log, "CSV file for the objective trace");
  distill_cmd->add_option("--seed", dist.seed, "Random seed");

  PredictArgs pred;
  auto* predict_cmd = app.add_subcommand("predict", "Predict mean and variance for a CSV file");
  predict_cmd->add_option("--model", pred.model, "Bundle or teacher model file")->required();
  predict_cmd->add_option("--data", pred.data, "Input CSV with header")->required();
  predict_cmd->add_option("--target", pred.target, "Column to ignore if present");
  predict_cmd->add_option("--out", pred.out, "Output CSV")->required();
  predict_cmd->add_option("--seed", pred.seed, "Accepted for uniformity; unused");

  struct Named {
    const char* name;
    Experiment experiment;
    const char* help;
  };
  const Named named[] = {
      {"bench", Experiment::kBench, "SMSE, variance error and timing per method"},
      {"reconstruct", Experiment::kReconstruct, "Kernel reconstruction errors"},
      {"toy1d", Experiment::kToy1d, "1-D mean and variance curves"},
      {"sweep-b", Experiment::kSweepB, "SMSE and variance error versus sparsity"},
  };
  ExperimentArgs exp_args[4];
  CLI::App* exp_cmds[4];
  CLI::Option* exp_seed[4];
  for (int i = 0; i < 4; ++i) {
    exp_cmds[i] = app.add_subcommand(named[i].name, named[i].help);
    exp_cmds[i]->add_option("--config", exp_args[i].config, "JSON run configuration");
    exp_cmds[i]->add_option("--out", exp_args[i].out, "Report JSON")->required();
    exp_seed[i] = exp_cmds[i]->add_option("--seed", exp_args[i].seed, "Overrides the config seed");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*train_cmd) return run_train(train);
    if (*distill_cmd) return run_distill(dist, eta_opt->count() > 0);
    if (*predict_cmd) return run_predict(pred);
    for (int i = 0; i < 4; ++i) {
      if (*exp_cmds[i]) {
        return run_named_experiment(named[i].experiment, exp_args[i], exp_seed[i]->count() > 0);
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ContractViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
