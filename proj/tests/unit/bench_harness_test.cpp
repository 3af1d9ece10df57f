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

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gpdistill/csv.hpp"
#include "gpdistill/error.hpp"
#include "gpdistill/experiments.hpp"
#include "gpdistill/metrics.hpp"
#include "test_util.hpp"

namespace gpdistill {
namespace {

const std::string kDataDir = GPDISTILL_TEST_DATA_DIR;

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

TEST(Metrics, SmseExamples) {
  const Vector y = vec({1, 2, 3, 4});
  EXPECT_EQ(smse(y, y), 0.0);
  EXPECT_NEAR(smse(y, Vector::Constant(4, y.mean())), 1.0, 1e-15);
  // Residuals all 1, population variance 1.25.
  EXPECT_NEAR(smse(y, y.array() + 1.0), 0.8, 1e-15);
  EXPECT_THROW(smse(Vector::Constant(3, 2.0), Vector::Zero(3)), NumericalError);
  EXPECT_THROW(smse(y, Vector::Zero(3)), ContractViolation);
}

TEST(Metrics, RmseAndSummary) {
  EXPECT_NEAR(variance_rmse(vec({0, 0}), vec({3, 4})), std::sqrt(12.5), 1e-15);
  EXPECT_EQ(rmse(vec({1, 2}), vec({1, 2})), 0.0);
  Matrix a = Matrix::Zero(2, 2);
  Matrix b(2, 2);
  b << 1, 2, 3, 4;
  const AbsErrorSummary s = abs_error_summary(a, b);
  EXPECT_EQ(s.max, 4.0);
  EXPECT_EQ(s.mean, 2.5);
  EXPECT_EQ(s.median, 2.5);
  EXPECT_EQ(s.q25, 1.75);
  EXPECT_EQ(s.q75, 3.25);
}

TEST(Csv, ParsesQuotesAndLineEndings) {
  std::istringstream in("x,\"y, z\",\"say \"\"hi\"\"\"\r\n1,2,3\n4,5,6\r\n");
  const CsvTable t = parse_csv(in);
  ASSERT_EQ(t.header.size(), 3u);
  EXPECT_EQ(t.header[1], "y, z");
  EXPECT_EQ(t.header[2], "say \"hi\"");
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[1][2], "6");
  EXPECT_EQ(t.column("y, z"), 1u);
  EXPECT_THROW(t.column("nope"), ConfigError);
}

TEST(Csv, WriteThenParseRoundTrips) {
  CsvTable t;
  t.header = {"plain", "with,comma", "with\"quote"};
  t.rows = {{"1", "a,b", "q\"q"}, {"2", "", "x"}};
  std::ostringstream out;
  write_csv(out, t);
  std::istringstream in(out.str());
  const CsvTable back = parse_csv(in);
  EXPECT_EQ(back.header, t.header);
  EXPECT_EQ(back.rows, t.rows);
}

TEST(Csv, RaggedRowsAndNonNumericAreErrors) {
  std::istringstream ragged("a,b\n1,2\n3\n");
  EXPECT_THROW(parse_csv(ragged), ConfigError);
  std::istringstream text("a,b\n1,2\n3,oops\n");
  const CsvTable t = parse_csv(text);
  try {
    numeric_matrix(t);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("data row 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("'b'"), std::string::npos) << msg;
  }
}

TEST(LoadCsv, SplitsAndStandardizesWithTrainStatistics) {
  const TrainTest tt = load_csv(kDataDir + "/tiny.csv", "target", true, 0, 0.8);
  EXPECT_EQ(tt.train.size(), 8);
  EXPECT_EQ(tt.test.size(), 2);
  EXPECT_EQ(tt.train.dim(), 2);
  EXPECT_NEAR(tt.train.y.mean(), 0.0, 1e-12);
  EXPECT_NEAR(std::sqrt((tt.train.y.array() - tt.train.y.mean()).square().mean()), 1.0, 1e-12);
  for (Index j = 0; j < 2; ++j) EXPECT_NEAR(tt.train.x.col(j).mean(), 0.0, 1e-12);
  // The target is 2a + 1; the relation survives the round trip to original units.
  const Standardization& s = tt.test.scaling;
  const Vector y = s.inverse_target(tt.test.y);
  for (Index i = 0; i < 2; ++i) {
    const double a = tt.test.x(i, 0) * s.feature_sds(0) + s.feature_means(0);
    EXPECT_NEAR(y(i), 2 * a + 1, 1e-12);
  }
  EXPECT_TRUE(tt.train.scaling == tt.test.scaling);
}

TEST(LoadCsv, SameSeedSameSplit) {
  const TrainTest a = load_csv(kDataDir + "/sample.csv", "y", true, 3, 0.5);
  const TrainTest b = load_csv(kDataDir + "/sample.csv", "y", true, 3, 0.5);
  EXPECT_EQ(a.train.x, b.train.x);
  EXPECT_EQ(a.test.y, b.test.y);
}

TEST(LoadCsv, ErrorsAreConfigErrors) {
  EXPECT_THROW(load_csv(kDataDir + "/tiny.csv", "missing", true, 0, 0.8), ConfigError);
  EXPECT_THROW(load_csv(kDataDir + "/does_not_exist.csv", "y", true, 0, 0.8), ConfigError);
  Matrix x(4, 1);
  x << 1, 2, 3, 4;
  EXPECT_THROW(split_dataset(x, Vector::Constant(4, 7.0), 0.5, true, 0), ConfigError);
}

TEST(RunConfig, JsonRoundTripAndStrictKeys) {
  RunConfig cfg = RunConfig::from_json(R"({"experiment": "bench", "seed": 9,
      "distill": {"m": 50, "b": 7, "mode": "paper"}, "data": {"n": 300, "d": 3}})");
  EXPECT_EQ(cfg.experiment, Experiment::kBench);
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_EQ(cfg.distill.m, 50);
  EXPECT_EQ(cfg.distill.b, 7);
  EXPECT_EQ(cfg.distill.gradient_mode, GradientMode::kPaperAlg1);
  EXPECT_EQ(cfg.data.n, 300);
  const RunConfig back = RunConfig::from_json(cfg.to_json());
  EXPECT_EQ(back.to_json(), cfg.to_json());
  EXPECT_THROW(RunConfig::from_json(R"({"distill": {"mm": 3}})"), ConfigError);
  EXPECT_THROW(RunConfig::from_json(R"({"bogus": 1})"), ConfigError);
  EXPECT_THROW(RunConfig::from_json(R"({"distill": {"b": "ten"}})"), ConfigError);
  EXPECT_THROW(RunConfig::from_json("{"), ConfigError);
  EXPECT_THROW(RunConfig::from_json(R"({"methods": ["magic"]})"), ConfigError);
  EXPECT_EQ(experiment_from_string("sweep-b"), Experiment::kSweepB);
}

RunConfig tiny_bench() {
  RunConfig cfg = RunConfig::defaults(Experiment::kBench);
  cfg.data.n = 300;
  cfg.data.d = 3;
  cfg.teacher.steps = 10;
  cfg.teacher.subset = 100;
  cfg.distill.m = 30;
  cfg.distill.b = 5;
  cfg.distill.iterations = 10;
  cfg.sor_m = 30;
  cfg.fitc_m = 30;
  cfg.timing = false;
  return cfg;
}

TEST(Bench, MeanPredictorScoresOneAndReportIsDeterministic) {
  const RunConfig cfg = tiny_bench();
  const BenchResult r = run_benchmark(cfg);
  EXPECT_EQ(r.mean_predictor_smse, 1.0);
  ASSERT_NE(find_method(r.methods, "exact"), nullptr);
  ASSERT_NE(find_method(r.methods, "distill"), nullptr);
  EXPECT_EQ(find_method(r.methods, "kiss1d"), nullptr);
  for (const auto& m : r.methods) {
    EXPECT_TRUE(m.ok) << m.method << ": " << m.error;
    EXPECT_LT(m.smse, 1.0) << m.method;
  }
  const Report a = make_report(cfg, r);
  const Report b = run_experiment(cfg);
  EXPECT_EQ(a.json, b.json);
  const auto parsed = nlohmann::json::parse(a.json);
  EXPECT_EQ(parsed["schema_version"], kReportSchemaVersion);
}

TEST(Bench, WriteReportCreatesSidecars) {
  const auto dir = std::filesystem::temp_directory_path() / "gpdistill_report_test";
  std::filesystem::create_directories(dir);
  RunConfig cfg = tiny_bench();
  const Report r = run_experiment(cfg);
  const std::string path = (dir / "out.json").string();
  write_report(r, path);
  EXPECT_TRUE(std::filesystem::exists(path));
  for (const auto& [name, table] : r.sidecars) {
    EXPECT_TRUE(std::filesystem::exists(dir / ("out." + name + ".csv"))) << name;
  }
  std::filesystem::remove_all(dir);
}

TEST(Reconstruction, ReducedRunBeatsLargerSor) {
  RunConfig cfg = RunConfig::defaults(Experiment::kReconstruct);
  cfg.recon_n = 200;
  cfg.distill.m = 50;
  cfg.distill.b = 6;
  cfg.sor_m = 100;
  cfg.kiss_grid = 100;
  cfg.b_list = {2, 6};
  const ReconstructionResult r = run_reconstruction(cfg);
  EXPECT_LE(r.distill_error, r.sor_error);
  EXPECT_LE(r.distill_error, r.distill_init_error);
  ASSERT_EQ(r.b_curve.size(), 2u);
  EXPECT_GT(r.b_curve[0].second, r.b_curve[1].second);
  EXPECT_LE(r.distill_abs.median, r.distill_abs.max);
}

TEST(Report, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

}  // namespace
}  // namespace gpdistill
