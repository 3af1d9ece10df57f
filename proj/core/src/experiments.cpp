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

#include "gpdistill/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <Eigen/Core>

#include "gpdistill/error.hpp"
#include "gpdistill/fast_inference.hpp"
#include "gpdistill/spatial_index.hpp"
#include "gpdistill/synthetic.hpp"
#include "json.hpp"

#ifndef GPDISTILL_VERSION
#define GPDISTILL_VERSION "unknown"
#endif

namespace gpdistill {

using nlohmann::json;

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::kReconstruct: return "reconstruct";
    case Experiment::kToy1d: return "toy1d";
    case Experiment::kBench: return "bench";
    case Experiment::kSweepB: return "sweep_b";
  }
  return "bench";
}

Experiment experiment_from_string(const std::string& name) {
  if (name == "reconstruct") return Experiment::kReconstruct;
  if (name == "toy1d") return Experiment::kToy1d;
  if (name == "bench") return Experiment::kBench;
  if (name == "sweep_b" || name == "sweep-b") return Experiment::kSweepB;
  throw ConfigError("unknown experiment '" + name + "'");
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Configuration

RunConfig RunConfig::defaults(Experiment e) {
  RunConfig cfg;
  cfg.experiment = e;
  cfg.distill.iterations = 100;
  switch (e) {
    case Experiment::kReconstruct:
      cfg.distill.m = 100;
      cfg.distill.b = 6;
      cfg.sor_m = 200;
      cfg.kiss_grid = 400;
      cfg.b_list = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
      cfg.methods = {"distill", "sor", "kiss1d"};
      break;
    case Experiment::kToy1d:
      cfg.teacher.family = KernelFamily::kRbf;
      cfg.teacher.noise_variance = 0.5;
      cfg.teacher.subset = 1000;
      cfg.teacher.steps = 60;
      cfg.distill.m = 100;
      cfg.distill.b = 10;
      cfg.methods = {"exact", "distill", "kiss1d"};
      break;
    case Experiment::kBench:
      cfg.data.synthetic = "correlated_rbf";
      cfg.distill.m = 200;
      cfg.distill.b = 30;
      cfg.methods = {"exact", "sor", "fitc", "distill"};
      break;
    case Experiment::kSweepB:
      cfg.data.synthetic = "gp1d";
      cfg.data.n = 2000;
      cfg.data.d = 1;
      cfg.teacher.family = KernelFamily::kRbf;
      cfg.distill.m = 200;
      cfg.distill.b = 5;
      cfg.b_list = {5, 10, 15, 20, 25, 30, 35, 40};
      cfg.methods = {"exact", "distill", "kiss1d"};
      cfg.timing = false;
      break;
  }
  return cfg;
}

namespace {

void check_keys(const json& obj, const char* where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
  for (const auto& item : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return item.key() == k; });
    if (!known) throw ConfigError(std::string("unknown key '") + item.key() + "' in " + where);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const char* where) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("wrong type for '") + key + "' in " + where);
  }
}

void read_index(const json& obj, const char* key, Index& out, const char* where) {
  long long v = static_cast<long long>(out);
  read(obj, key, v, where);
  out = static_cast<Index>(v);
}

std::string mode_name(GradientMode m) {
  return m == GradientMode::kAnalyticFnorm ? "analytic" : "paper";
}

std::string system_name(TestWeightSystem s) {
  return s == TestWeightSystem::kSquare ? "square" : "rows";
}

}  // namespace

RunConfig RunConfig::from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(root, "config",
             {"experiment", "seed", "data", "methods", "teacher", "distill", "sor", "fitc",
              "kiss1d", "reconstruct", "toy1d", "b_list", "timing"});
  std::string experiment = "bench";
  read(root, "experiment", experiment, "config");
  RunConfig cfg = defaults(experiment_from_string(experiment));
  read(root, "seed", cfg.seed, "config");
  read(root, "methods", cfg.methods, "config");

  if (const auto it = root.find("data"); it != root.end()) {
    const json& d = *it;
    check_keys(d, "data", {"path", "target", "synthetic", "n", "d", "noise_sd", "lengthscale",
                           "split", "standardize"});
    read(d, "path", cfg.data.path, "data");
    read(d, "target", cfg.data.target, "data");
    read(d, "synthetic", cfg.data.synthetic, "data");
    read_index(d, "n", cfg.data.n, "data");
    read_index(d, "d", cfg.data.d, "data");
    read(d, "noise_sd", cfg.data.noise_sd, "data");
    read(d, "lengthscale", cfg.data.lengthscale, "data");
    read(d, "split", cfg.data.split, "data");
    read(d, "standardize", cfg.data.standardize, "data");
  }
  if (const auto it = root.find("teacher"); it != root.end()) {
    const json& t = *it;
    check_keys(t, "teacher",
               {"family", "lengthscales", "noise_variance", "steps", "learning_rate", "subset"});
    std::string family = to_string(cfg.teacher.family);
    read(t, "family", family, "teacher");
    try {
      cfg.teacher.family = kernel_family_from_string(family);
    } catch (const ContractViolation& e) {
      throw ConfigError(e.what());
    }
    if (t.contains("lengthscales") && !t["lengthscales"].is_null()) {
      std::vector<double> ls;
      read(t, "lengthscales", ls, "teacher");
      cfg.teacher.lengthscales = ls;
    }
    read(t, "noise_variance", cfg.teacher.noise_variance, "teacher");
    read(t, "steps", cfg.teacher.steps, "teacher");
    read(t, "learning_rate", cfg.teacher.learning_rate, "teacher");
    read_index(t, "subset", cfg.teacher.subset, "teacher");
  }
  if (const auto it = root.find("distill"); it != root.end()) {
    const json& d = *it;
    check_keys(d, "distill", {"m", "b", "iterations", "eta", "mode", "line_search",
                              "track_objective", "test_system"});
    read_index(d, "m", cfg.distill.m, "distill");
    read_index(d, "b", cfg.distill.b, "distill");
    read(d, "iterations", cfg.distill.iterations, "distill");
    if (d.contains("eta") && !d["eta"].is_null()) {
      double eta = 0.0;
      read(d, "eta", eta, "distill");
      cfg.distill.eta = eta;
    }
    std::string mode = mode_name(cfg.distill.gradient_mode);
    read(d, "mode", mode, "distill");
    if (mode == "analytic") {
      cfg.distill.gradient_mode = GradientMode::kAnalyticFnorm;
    } else if (mode == "paper") {
      cfg.distill.gradient_mode = GradientMode::kPaperAlg1;
    } else {
      throw ConfigError("distill.mode must be 'analytic' or 'paper'");
    }
    read(d, "line_search", cfg.distill.line_search, "distill");
    read(d, "track_objective", cfg.distill.track_objective, "distill");
    std::string system = system_name(cfg.distill.test_system);
    read(d, "test_system", system, "distill");
    if (system == "square") {
      cfg.distill.test_system = TestWeightSystem::kSquare;
    } else if (system == "rows") {
      cfg.distill.test_system = TestWeightSystem::kRows;
    } else {
      throw ConfigError("distill.test_system must be 'square' or 'rows'");
    }
  }
  if (const auto it = root.find("sor"); it != root.end()) {
    check_keys(*it, "sor", {"m"});
    read_index(*it, "m", cfg.sor_m, "sor");
  }
  if (const auto it = root.find("fitc"); it != root.end()) {
    check_keys(*it, "fitc", {"m"});
    read_index(*it, "m", cfg.fitc_m, "fitc");
  }
  if (const auto it = root.find("kiss1d"); it != root.end()) {
    check_keys(*it, "kiss1d", {"grid"});
    read_index(*it, "grid", cfg.kiss_grid, "kiss1d");
  }
  if (const auto it = root.find("reconstruct"); it != root.end()) {
    check_keys(*it, "reconstruct", {"n", "lengthscale"});
    read_index(*it, "n", cfg.recon_n, "reconstruct");
    read(*it, "lengthscale", cfg.recon_lengthscale, "reconstruct");
  }
  if (const auto it = root.find("toy1d"); it != root.end()) {
    check_keys(*it, "toy1d", {"n", "test_grid"});
    read_index(*it, "n", cfg.toy_n, "toy1d");
    read_index(*it, "test_grid", cfg.test_grid, "toy1d");
  }
  if (root.contains("b_list")) {
    std::vector<long long> bl;
    read(root, "b_list", bl, "config");
    cfg.b_list.assign(bl.begin(), bl.end());
  }
  if (const auto it = root.find("timing"); it != root.end()) {
    check_keys(*it, "timing", {"enabled", "points", "repetitions"});
    read(*it, "enabled", cfg.timing, "timing");
    read_index(*it, "points", cfg.timing_points, "timing");
    read(*it, "repetitions", cfg.timing_repetitions, "timing");
  }
  cfg.validate();
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

namespace {

json config_json(const RunConfig& cfg) {
  json j;
  j["experiment"] = to_string(cfg.experiment);
  j["seed"] = cfg.seed;
  j["data"] = {{"path", cfg.data.path},         {"target", cfg.data.target},
               {"synthetic", cfg.data.synthetic}, {"n", cfg.data.n},
               {"d", cfg.data.d},               {"noise_sd", cfg.data.noise_sd},
               {"lengthscale", cfg.data.lengthscale}, {"split", cfg.data.split},
               {"standardize", cfg.data.standardize}};
  j["methods"] = cfg.methods;
  json teacher = {{"family", to_string(cfg.teacher.family)},
                  {"noise_variance", cfg.teacher.noise_variance},
                  {"steps", cfg.teacher.steps},
                  {"learning_rate", cfg.teacher.learning_rate},
                  {"subset", cfg.teacher.subset}};
  teacher["lengthscales"] = cfg.teacher.lengthscales ? json(*cfg.teacher.lengthscales) : json();
  j["teacher"] = teacher;
  json distill = {{"m", cfg.distill.m},
                  {"b", cfg.distill.b},
                  {"iterations", cfg.distill.iterations},
                  {"mode", mode_name(cfg.distill.gradient_mode)},
                  {"line_search", cfg.distill.line_search},
                  {"track_objective", cfg.distill.track_objective},
                  {"test_system", system_name(cfg.distill.test_system)}};
  distill["eta"] = cfg.distill.eta ? json(*cfg.distill.eta) : json();
  j["distill"] = distill;
  j["sor"] = {{"m", cfg.sor_m}};
  j["fitc"] = {{"m", cfg.fitc_m}};
  j["kiss1d"] = {{"grid", cfg.kiss_grid}};
  j["reconstruct"] = {{"n", cfg.recon_n}, {"lengthscale", cfg.recon_lengthscale}};
  j["toy1d"] = {{"n", cfg.toy_n}, {"test_grid", cfg.test_grid}};
  j["b_list"] = cfg.b_list;
  j["timing"] = {{"enabled", cfg.timing},
                 {"points", cfg.timing_points},
                 {"repetitions", cfg.timing_repetitions}};
  return j;
}

}  // namespace

std::string RunConfig::to_json() const { return config_json(*this).dump(2); }

void RunConfig::validate() const {
  static const std::set<std::string> known{"exact", "sor", "fitc", "kiss1d", "distill"};
  for (const auto& m : methods) {
    if (!known.contains(m)) throw ConfigError("unknown method '" + m + "'");
  }
  try {
    distill.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
  if (!(data.split > 0.0 && data.split < 1.0)) throw ConfigError("data.split must lie in (0, 1)");
  if (sor_m < 1 || fitc_m < 1) throw ConfigError("sor.m and fitc.m must be positive");
  if (kiss_grid < 4) throw ConfigError("kiss1d.grid must be at least 4");
  if (recon_n < 2 || !(recon_lengthscale > 0.0)) {
    throw ConfigError("reconstruct needs n >= 2 and a positive lengthscale");
  }
  if (toy_n < 2 || test_grid < 2) throw ConfigError("toy1d needs n >= 2 and test_grid >= 2");
  if (teacher.steps < 0 || !(teacher.learning_rate > 0.0) || !(teacher.noise_variance > 0.0) ||
      teacher.subset < 2) {
    throw ConfigError("teacher needs steps >= 0, positive learning rate and noise, subset >= 2");
  }
  for (std::size_t i = 0; i < b_list.size(); ++i) {
    if (b_list[i] < 1) throw ConfigError("b_list entries must be positive");
    if (i > 0 && b_list[i] < b_list[i - 1]) throw ConfigError("b_list must be ascending");
  }
  if (timing_points < 1 || timing_repetitions < 1) {
    throw ConfigError("timing needs points >= 1 and repetitions >= 1");
  }
}

// ---------------------------------------------------------------------------
// Data and teacher

TrainTest load_data(const RunConfig& cfg) {
  const DataSource& src = cfg.data;
  if (!src.path.empty()) {
    return load_csv(src.path, src.target, src.standardize, cfg.seed, src.split);
  }
  SyntheticData raw;
  if (src.synthetic == "correlated_rbf") {
    raw = correlated_rbf(src.n, src.d, src.noise_sd, cfg.seed);
  } else if (src.synthetic == "gp1d") {
    raw = gp_draw_1d(src.n, src.lengthscale, src.noise_sd, cfg.seed);
  } else if (src.synthetic == "toy1d") {
    raw = toy1d(src.n, cfg.seed);
  } else {
    throw ConfigError("unknown synthetic generator '" + src.synthetic + "'");
  }
  return split_dataset(raw.x, raw.y, src.split, src.standardize, cfg.seed);
}

ExactGPModel train_teacher(const Dataset& train, const TeacherConfig& cfg) {
  const Index d = train.dim();
  KernelSpec init;
  init.family = cfg.family;
  init.noise_variance = cfg.noise_variance;
  if (cfg.lengthscales) {
    init.lengthscales = *cfg.lengthscales;
  } else {
    init.lengthscales.assign(cfg.family == KernelFamily::kArd ? static_cast<std::size_t>(d) : 1,
                             1.0);
  }
  try {
    init.validate();
    init.check_dimension(d);
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("teacher kernel: ") + e.what());
  }
  KernelSpec fitted = init;
  if (cfg.steps > 0) {
    const Index k = std::min(cfg.subset, train.size());
    Dataset sub;
    sub.x = train.x.topRows(k);
    sub.y = train.y.head(k);
    sub.scaling = train.scaling;
    fitted = train_exact(sub, init, cfg.steps, cfg.learning_rate).spec();
  }
  return ExactGPModel(train, fitted);
}

const MethodResult* find_method(const std::vector<MethodResult>& methods,
                                const std::string& name) {
  for (const auto& m : methods) {
    if (m.method == name) return &m;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

bool wants(const RunConfig& cfg, const std::string& method) {
  return std::find(cfg.methods.begin(), cfg.methods.end(), method) != cfg.methods.end();
}

Prediction to_prediction(const std::vector<PredictionResult>& rows) {
  Prediction p;
  p.mean.resize(static_cast<Index>(rows.size()));
  p.variance.resize(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    p.mean(static_cast<Index>(i)) = rows[i].mean;
    p.variance(static_cast<Index>(i)) = rows[i].variance;
    if (rows[i].clamped) ++p.clamped;
  }
  return p;
}

// Median over repetitions of the mean per-point latency, after one warm-up
// pass. Each point is predicted on its own.
double time_per_point(const std::function<void(Index)>& predict_one, Index count,
                      int repetitions) {
  using Clock = std::chrono::steady_clock;
  for (Index i = 0; i < std::min<Index>(count, 10); ++i) predict_one(i);
  std::vector<double> samples;
  for (int r = 0; r < repetitions; ++r) {
    const auto start = Clock::now();
    for (Index i = 0; i < count; ++i) predict_one(i);
    const std::chrono::duration<double> elapsed = Clock::now() - start;
    samples.push_back(elapsed.count() / static_cast<double>(count));
  }
  std::sort(samples.begin(), samples.end());
  return samples[samples.size() / 2];
}

void score(MethodResult& r, const Dataset& test, const Prediction* exact) {
  const Standardization& s = test.scaling;
  r.smse = smse(s.inverse_target(test.y), s.inverse_target(r.prediction.mean));
  r.clamped = r.prediction.clamped;
  if (exact != nullptr) {
    r.mean_rmse = rmse(exact->mean, r.prediction.mean);
    r.variance_rmse = variance_rmse(exact->variance, r.prediction.variance);
  }
}

// Runs one method, recording a failure instead of propagating it.
MethodResult run_method(const std::string& name, const std::function<void(MethodResult&)>& body) {
  MethodResult r;
  r.method = name;
  try {
    body(r);
  } catch (const std::exception& e) {
    r = MethodResult{};
    r.method = name;
    r.ok = false;
    r.error = e.what();
  }
  return r;
}

Matrix single_row(const Matrix& x, Index i) { return x.row(i); }

}  // namespace

ReconstructionResult run_reconstruction(const RunConfig& cfg) {
  cfg.validate();
  ReconstructionResult out;
  out.n = cfg.recon_n;
  out.lengthscale = cfg.recon_lengthscale;
  const Vector x = reconstruction_inputs(cfg.recon_n, cfg.seed);
  const Matrix xm = x;
  const KernelSpec spec = KernelSpec::rbf(cfg.recon_lengthscale, 1e-2);
  const Matrix k_xx = kernel_matrix(spec, xm);

  const InducingSet inducing = kmeans(xm, cfg.distill.m, cfg.seed);
  DistillConfig dc = cfg.distill;
  dc.track_objective = true;
  const KernelDistillation kd = distill_kernel(spec, xm, inducing, dc);
  out.distill_log = kd.log;
  out.distill_init_error = kd.log.front().objective;
  const Matrix k_distill = [&] {
    const Matrix p = kd.weights.times(kd.k_uu);
    return Matrix(kd.weights.times(Matrix(p.transpose())));
  }();
  out.distill_error = fro_diff(k_xx, k_distill);
  out.distill_abs = abs_error_summary(k_xx, k_distill);

  const Matrix k_sor = sor_kernel_approximation(spec, xm, kmeans(xm, cfg.sor_m, cfg.seed));
  out.sor_error = fro_diff(k_xx, k_sor);
  out.sor_abs = abs_error_summary(k_xx, k_sor);

  const Matrix k_kiss = kiss_kernel_approximation(spec, x, Grid1d::covering(x, cfg.kiss_grid));
  out.kiss_error = fro_diff(k_xx, k_kiss);
  out.kiss_abs = abs_error_summary(k_xx, k_kiss);

  std::vector<Index> bl;
  for (Index b : cfg.b_list) {
    if (b <= cfg.distill.m) bl.push_back(b);
  }
  out.b_curve = error_vs_sparsity(spec, xm, inducing, dc, bl);
  return out;
}

Toy1dResult run_toy1d(const RunConfig& cfg) {
  cfg.validate();
  const SyntheticData raw = toy1d(cfg.toy_n, cfg.seed);
  // Inputs stay in their natural units; only the target is standardized.
  Standardization scaling = Standardization::fit(raw.x, raw.y);
  scaling.feature_means.setZero();
  scaling.feature_sds.setOnes();
  Dataset train;
  train.x = raw.x;
  train.y = scaling.transform_target(raw.y);
  train.scaling = scaling;

  TeacherConfig tc = cfg.teacher;
  tc.family = KernelFamily::kRbf;
  const ExactGPModel teacher = train_teacher(train, tc);

  Toy1dResult out;
  out.teacher_spec = teacher.spec();
  out.scaling = scaling;
  out.grid = Vector::LinSpaced(cfg.test_grid, -10.0, 10.0);
  out.truth.resize(cfg.test_grid);
  for (Index i = 0; i < cfg.test_grid; ++i) out.truth(i) = toy1d_signal(out.grid(i));
  const Matrix queries = out.grid;
  Dataset test;
  test.x = queries;
  test.y = scaling.transform_target(out.truth);
  test.scaling = scaling;

  const Prediction exact = predict_exact(teacher, queries);
  out.methods.push_back(run_method("exact", [&](MethodResult& r) {
    r.prediction = exact;
    score(r, test, &exact);
  }));
  if (wants(cfg, "distill")) {
    out.methods.push_back(run_method("distill", [&](MethodResult& r) {
      DistillResult d = distill(teacher, cfg.distill, cfg.seed);
      out.distill_log = d.log;
      r.prediction = to_prediction(predict_batch(d.model, queries));
      score(r, test, &exact);
    }));
  }
  if (wants(cfg, "kiss1d")) {
    out.methods.push_back(run_method("kiss1d", [&](MethodResult& r) {
      const Kiss1dModel k = fit_kiss1d(train, teacher.spec(), cfg.kiss_grid);
      r.prediction = predict_kiss1d(k, queries);
      score(r, test, &exact);
    }));
  }
  return out;
}

BenchResult run_benchmark(const RunConfig& cfg) {
  cfg.validate();
  const TrainTest data = load_data(cfg);
  const ExactGPModel teacher = train_teacher(data.train, cfg.teacher);
  const Dataset& test = data.test;

  BenchResult out;
  out.teacher_spec = teacher.spec();
  out.n_train = data.train.size();
  out.n_test = test.size();
  out.dim = test.dim();
  {
    const Vector y = test.scaling.inverse_target(test.y);
    out.mean_predictor_smse = smse(y, Vector::Constant(y.size(), y.mean()));
  }

  const Index timed = std::min(cfg.timing_points, test.size());
  const auto maybe_time = [&](MethodResult& r, const std::function<void(Index)>& one) {
    if (cfg.timing) r.seconds_per_point = time_per_point(one, timed, cfg.timing_repetitions);
  };

  const Prediction exact = predict_exact(teacher, test.x);
  if (wants(cfg, "exact")) {
    out.methods.push_back(run_method("exact", [&](MethodResult& r) {
      r.prediction = exact;
      score(r, test, &exact);
      maybe_time(r, [&](Index i) { (void)predict_exact(teacher, single_row(test.x, i)); });
    }));
  }
  for (const auto& [name, variant, m] :
       {std::tuple{"sor", InducingVariant::kSoR, cfg.sor_m},
        std::tuple{"fitc", InducingVariant::kFitc, cfg.fitc_m}}) {
    if (!wants(cfg, name)) continue;
    out.methods.push_back(run_method(name, [&](MethodResult& r) {
      const SorFitcModel model =
          fit_sor_fitc(data.train, teacher.spec(), kmeans(data.train.x, m, cfg.seed), variant);
      r.prediction = predict_sor_fitc(model, test.x);
      score(r, test, &exact);
      maybe_time(r, [&](Index i) { (void)predict_sor_fitc(model, single_row(test.x, i)); });
    }));
  }
  if (wants(cfg, "kiss1d")) {
    out.methods.push_back(run_method("kiss1d", [&](MethodResult& r) {
      const Kiss1dModel model = fit_kiss1d(data.train, teacher.spec(), cfg.kiss_grid);
      r.prediction = predict_kiss1d(model, test.x);
      score(r, test, &exact);
      maybe_time(r, [&](Index i) { (void)predict_kiss1d(model, single_row(test.x, i)); });
    }));
  }
  if (wants(cfg, "distill")) {
    out.methods.push_back(run_method("distill", [&](MethodResult& r) {
      DistillResult d = distill(teacher, cfg.distill, cfg.seed);
      out.distill_log = d.log;
      r.prediction = to_prediction(predict_batch(d.model, test.x));
      score(r, test, &exact);
      maybe_time(r, [&](Index i) { (void)predict_point(d.model, test.x.row(i).transpose()); });
    }));
  }
  return out;
}

SweepResult run_sweep_b(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.b_list.empty()) throw ConfigError("sweep_b needs a non-empty b_list");
  const TrainTest data = load_data(cfg);
  TeacherConfig tc = cfg.teacher;
  if (data.train.dim() == 1) tc.family = KernelFamily::kRbf;
  const ExactGPModel teacher = train_teacher(data.train, tc);
  const Dataset& test = data.test;

  SweepResult out;
  out.teacher_spec = teacher.spec();
  const Prediction exact = predict_exact(teacher, test.x);
  out.exact_smse = smse(test.scaling.inverse_target(test.y), test.scaling.inverse_target(exact.mean));
  if (wants(cfg, "kiss1d") && test.dim() == 1) {
    const Kiss1dModel k = fit_kiss1d(data.train, teacher.spec(), cfg.kiss_grid);
    out.kiss_variance_rmse = variance_rmse(exact.variance, predict_kiss1d(k, test.x).variance);
  }

  const InducingSet inducing = kmeans(data.train.x, cfg.distill.m, cfg.seed);
  for (Index b : cfg.b_list) {
    DistillConfig dc = cfg.distill;
    dc.b = b;
    dc.validate();
    DistillResult d = distill_with_inducing(teacher, inducing, dc);
    MethodResult r;
    r.prediction = to_prediction(predict_batch(d.model, test.x));
    score(r, test, &exact);
    out.points.push_back({b, r.smse, r.variance_rmse, d.log.empty() ? 0.0 : d.log.back().objective});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

json environment_json() {
  return {{"library_version", GPDISTILL_VERSION},
          {"compiler", __VERSION__},
          {"eigen_version", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                std::to_string(EIGEN_MINOR_VERSION)},
          {"cplusplus", static_cast<long>(__cplusplus)}};
}

json header(const RunConfig& cfg) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["experiment"] = to_string(cfg.experiment);
  j["seed"] = cfg.seed;
  j["config"] = config_json(cfg);
  j["environment"] = environment_json();
  return j;
}

json spec_json(const KernelSpec& s) {
  return {{"family", to_string(s.family)},
          {"lengthscales", s.lengthscales},
          {"noise_variance", s.noise_variance}};
}

json summary_json(const AbsErrorSummary& s) {
  return {{"max", s.max}, {"mean", s.mean}, {"q25", s.q25}, {"median", s.median}, {"q75", s.q75}};
}

json method_json(const MethodResult& r) {
  json j = {{"method", r.method}, {"ok", r.ok}};
  if (!r.ok) {
    j["error"] = r.error;
    return j;
  }
  j["smse"] = r.smse;
  j["mean_rmse_vs_exact"] = r.mean_rmse;
  j["variance_rmse_vs_exact"] = r.variance_rmse;
  j["clamped"] = r.clamped;
  j["clamp_rate"] = r.prediction.mean.size() > 0 ? static_cast<double>(r.clamped) /
                                                       static_cast<double>(r.prediction.mean.size())
                                                 : 0.0;
  return j;
}

CsvTable trace_table(const std::vector<IterationRecord>& log) {
  CsvTable t;
  t.header = {"iteration", "objective", "step_size", "backtracks"};
  for (const auto& rec : log) {
    t.rows.push_back({std::to_string(rec.iteration), format_double(rec.objective),
                      format_double(rec.step_size), std::to_string(rec.backtracks)});
  }
  return t;
}

json trace_json(const std::vector<IterationRecord>& log) {
  if (log.empty()) return json::object();
  return {{"initial_objective", log.front().objective},
          {"final_objective", log.back().objective},
          {"iterations", log.back().iteration}};
}

// Every metric must be finite; nlohmann would silently write null.
void check_finite(const json& j, const std::string& where) {
  if (j.is_number_float() && !std::isfinite(j.get<double>())) {
    throw NumericalError("report value at " + where + " is not finite");
  }
  if (j.is_object()) {
    for (const auto& item : j.items()) check_finite(item.value(), where + "." + item.key());
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) check_finite(j[i], where + "[" + std::to_string(i) + "]");
  }
}

Report finish(json j, std::vector<std::pair<std::string, CsvTable>> sidecars) {
  check_finite(j, "report");
  return {j.dump(2) + "\n", std::move(sidecars)};
}

}  // namespace

Report make_report(const RunConfig& cfg, const ReconstructionResult& r) {
  json j = header(cfg);
  j["results"] = {
      {"n", r.n},
      {"lengthscale", r.lengthscale},
      {"fnorm_error", {{"distill", r.distill_error}, {"sor", r.sor_error}, {"kiss1d", r.kiss_error}}},
      {"distill_init_error", r.distill_init_error},
      {"abs_error",
       {{"distill", summary_json(r.distill_abs)},
        {"sor", summary_json(r.sor_abs)},
        {"kiss1d", summary_json(r.kiss_abs)}}},
      {"distill_trace", trace_json(r.distill_log)}};
  json curve = json::array();
  CsvTable bt;
  bt.header = {"b", "objective"};
  for (const auto& [b, e] : r.b_curve) {
    curve.push_back({{"b", b}, {"objective", e}});
    bt.rows.push_back({std::to_string(b), format_double(e)});
  }
  j["results"]["error_vs_b"] = curve;
  return finish(std::move(j), {{"b_curve", bt}, {"trace", trace_table(r.distill_log)}});
}

Report make_report(const RunConfig& cfg, const Toy1dResult& r) {
  json j = header(cfg);
  j["results"]["teacher"] = spec_json(r.teacher_spec);
  j["results"]["methods"] = json::array();
  for (const auto& m : r.methods) j["results"]["methods"].push_back(method_json(m));
  j["results"]["distill_trace"] = trace_json(r.distill_log);

  CsvTable curves;
  curves.header = {"x", "truth"};
  for (const auto& m : r.methods) {
    if (!m.ok) continue;
    curves.header.push_back(m.method + "_mean");
    curves.header.push_back(m.method + "_variance");
  }
  const double sd2 = r.scaling.target_sd * r.scaling.target_sd;
  for (Index i = 0; i < r.grid.size(); ++i) {
    std::vector<std::string> row{format_double(r.grid(i)), format_double(r.truth(i))};
    for (const auto& m : r.methods) {
      if (!m.ok) continue;
      row.push_back(format_double(m.prediction.mean(i) * r.scaling.target_sd + r.scaling.target_mean));
      row.push_back(format_double(m.prediction.variance(i) * sd2));
    }
    curves.rows.push_back(std::move(row));
  }
  return finish(std::move(j), {{"curves", curves}, {"trace", trace_table(r.distill_log)}});
}

Report make_report(const RunConfig& cfg, const BenchResult& r) {
  json j = header(cfg);
  j["results"]["teacher"] = spec_json(r.teacher_spec);
  j["results"]["data"] = {{"n_train", r.n_train}, {"n_test", r.n_test}, {"dim", r.dim}};
  j["results"]["self_test"] = {{"mean_predictor_smse", r.mean_predictor_smse}};
  j["results"]["methods"] = json::array();
  for (const auto& m : r.methods) j["results"]["methods"].push_back(method_json(m));
  j["results"]["distill_trace"] = trace_json(r.distill_log);
  if (cfg.timing) {
    json per_point = json::object();
    for (const auto& m : r.methods) {
      if (m.ok && m.seconds_per_point) per_point[m.method] = *m.seconds_per_point;
    }
    j["timing"] = {{"clock", "steady_clock"},
                   {"points", std::min(cfg.timing_points, r.n_test)},
                   {"repetitions", cfg.timing_repetitions},
                   {"statistic", "median of per-point means after warm-up"},
                   {"hardware_threads", std::thread::hardware_concurrency()},
                   {"seconds_per_point", per_point}};
  }
  return finish(std::move(j), {{"trace", trace_table(r.distill_log)}});
}

Report make_report(const RunConfig& cfg, const SweepResult& r) {
  json j = header(cfg);
  j["results"]["teacher"] = spec_json(r.teacher_spec);
  j["results"]["exact_smse"] = r.exact_smse;
  if (r.kiss_variance_rmse) j["results"]["kiss1d_variance_rmse"] = *r.kiss_variance_rmse;
  json pts = json::array();
  CsvTable t;
  t.header = {"b", "smse", "variance_rmse", "objective"};
  for (const auto& p : r.points) {
    pts.push_back({{"b", p.b}, {"smse", p.smse}, {"variance_rmse", p.variance_rmse},
                   {"objective", p.objective}});
    t.rows.push_back({std::to_string(p.b), format_double(p.smse), format_double(p.variance_rmse),
                      format_double(p.objective)});
  }
  j["results"]["sweep"] = pts;
  return finish(std::move(j), {{"sweep", t}});
}

Report run_experiment(const RunConfig& cfg) {
  switch (cfg.experiment) {
    case Experiment::kReconstruct: return make_report(cfg, run_reconstruction(cfg));
    case Experiment::kToy1d: return make_report(cfg, run_toy1d(cfg));
    case Experiment::kBench: return make_report(cfg, run_benchmark(cfg));
    case Experiment::kSweepB: return make_report(cfg, run_sweep_b(cfg));
  }
  throw ConfigError("unknown experiment");
}

void write_report(const Report& report, const std::string& path) {
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    out << report.json;
    if (!out) throw ConfigError("failed writing '" + path + "'");
  }
  const std::filesystem::path p(path);
  for (const auto& [name, table] : report.sidecars) {
    std::filesystem::path side = p;
    side.replace_filename(p.stem().string() + "." + name + ".csv");
    write_csv(side.string(), table);
  }
}

}  // namespace gpdistill
