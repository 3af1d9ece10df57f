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

#include "gpdistill/serialization.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "gpdistill/error.hpp"

namespace gpdistill {
namespace {

constexpr char kDistilledMagic[] = "GPDISTIL1";
constexpr char kExactMagic[] = "GPEXACT1";
// Guards against absurd sizes from corrupt headers before allocating.
constexpr std::uint64_t kMaxDimension = 1u << 24;

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void magic(const char* tag) { out_.write(tag, static_cast<std::streamsize>(std::strlen(tag))); }

  void u64(std::uint64_t v) {
    std::array<char, 8> bytes{};
    for (int i = 0; i < 8; ++i) bytes[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xffu);
    out_.write(bytes.data(), 8);
  }

  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

  void matrix(const Matrix& a) {
    for (Index i = 0; i < a.rows(); ++i) {
      for (Index j = 0; j < a.cols(); ++j) f64(a(i, j));
    }
  }

  void vector(const Vector& v) {
    for (Index i = 0; i < v.size(); ++i) f64(v(i));
  }

  void spec(const KernelSpec& s) {
    u64(s.family == KernelFamily::kRbf ? 0 : 1);
    u64(s.lengthscales.size());
    for (double l : s.lengthscales) f64(l);
    f64(s.noise_variance);
  }

  void scaling(const Standardization& s) {
    vector(s.feature_means);
    vector(s.feature_sds);
    f64(s.target_mean);
    f64(s.target_sd);
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  Reader(std::istream& in, const char* format) : in_(in), format_(format) {}

  void expect_magic(const char* tag) {
    const std::size_t len = std::strlen(tag);
    std::string got(len, '\0');
    in_.read(got.data(), static_cast<std::streamsize>(len));
    if (!in_ || got != tag) {
      throw ConfigError(std::string("not a ") + format_ + " file (bad magic header)");
    }
  }

  std::uint64_t u64() {
    std::array<unsigned char, 8> bytes{};
    in_.read(reinterpret_cast<char*>(bytes.data()), 8);
    if (!in_) throw ConfigError(std::string(format_) + " file is truncated");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[static_cast<std::size_t>(i)];
    return v;
  }

  Index size(const char* what) {
    const std::uint64_t v = u64();
    if (v > kMaxDimension) {
      throw ConfigError(std::string(format_) + " file has implausible " + what);
    }
    return static_cast<Index>(v);
  }

  double f64() { return std::bit_cast<double>(u64()); }

  Matrix matrix(Index rows, Index cols) {
    Matrix a(rows, cols);
    for (Index i = 0; i < rows; ++i) {
      for (Index j = 0; j < cols; ++j) a(i, j) = f64();
    }
    return a;
  }

  Vector vector(Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = f64();
    return v;
  }

  KernelSpec spec() {
    KernelSpec s;
    const std::uint64_t family = u64();
    if (family > 1) throw ConfigError(std::string(format_) + " file has unknown kernel family");
    s.family = family == 0 ? KernelFamily::kRbf : KernelFamily::kArd;
    s.lengthscales.resize(static_cast<std::size_t>(size("lengthscale count")));
    for (double& l : s.lengthscales) l = f64();
    s.noise_variance = f64();
    try {
      s.validate();
    } catch (const ContractViolation& e) {
      throw ConfigError(std::string(format_) + " file has an invalid kernel: " + e.what());
    }
    return s;
  }

  Standardization scaling(Index d) {
    Standardization s;
    s.feature_means = vector(d);
    s.feature_sds = vector(d);
    s.target_mean = f64();
    s.target_sd = f64();
    return s;
  }

  void expect_end() {
    if (in_.peek() != std::char_traits<char>::eof()) {
      throw ConfigError(std::string(format_) + " file has trailing bytes");
    }
  }

 private:
  std::istream& in_;
  const char* format_;
};

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return in;
}

}  // namespace

void write_distilled(std::ostream& out, const DistilledModel& model) {
  const Index d = model.inducing.dim();
  const Index m = model.inducing.size();
  Writer w(out);
  w.magic(kDistilledMagic);
  w.u64(static_cast<std::uint64_t>(d));
  w.u64(static_cast<std::uint64_t>(m));
  w.u64(static_cast<std::uint64_t>(model.b));
  w.spec(model.spec);
  w.u64(model.system == TestWeightSystem::kSquare ? 0 : 1);
  w.matrix(model.inducing.points());
  w.matrix(model.k_uu);
  w.vector(model.alpha_tilde);
  w.matrix(model.v);
  w.scaling(model.scaling);
  if (!out) throw ConfigError("failed writing inference bundle");
}

DistilledModel read_distilled(std::istream& in) {
  Reader r(in, kDistilledMagic);
  r.expect_magic(kDistilledMagic);
  const Index d = r.size("dimension");
  const Index m = r.size("inducing count");
  DistilledModel model;
  model.b = r.size("sparsity");
  if (d < 1 || m < 1 || model.b < 1 || model.b > m) {
    throw ConfigError("GPDISTIL1 file has inconsistent sizes");
  }
  model.spec = r.spec();
  const std::uint64_t system = r.u64();
  if (system > 1) throw ConfigError("GPDISTIL1 file has unknown test-weight system");
  model.system = system == 0 ? TestWeightSystem::kSquare : TestWeightSystem::kRows;
  model.inducing = InducingSet(r.matrix(m, d));
  model.k_uu = r.matrix(m, m);
  model.alpha_tilde = r.vector(m);
  model.v = r.matrix(m, m);
  model.scaling = r.scaling(d);
  r.expect_end();
  return model;
}

void save_distilled(const std::string& path, const DistilledModel& model) {
  std::ofstream out = open_out(path);
  write_distilled(out, model);
}

DistilledModel load_distilled(const std::string& path) {
  std::ifstream in = open_in(path);
  return read_distilled(in);
}

std::size_t inference_bundle_bytes(const DistilledModel& model) {
  std::ostringstream buffer(std::ios::binary);
  write_distilled(buffer, model);
  return buffer.str().size();
}

void write_exact(std::ostream& out, const ExactGPModel& model) {
  const Dataset& data = model.data();
  const Index n = data.size();
  Writer w(out);
  w.magic(kExactMagic);
  w.u64(static_cast<std::uint64_t>(n));
  w.u64(static_cast<std::uint64_t>(data.dim()));
  w.spec(model.spec());
  w.matrix(data.x);
  w.vector(data.y);
  const Matrix& l = model.chol().lower();
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j <= i; ++j) w.f64(l(i, j));
  }
  w.scaling(data.scaling);
  if (!out) throw ConfigError("failed writing teacher model");
}

ExactGPModel read_exact(std::istream& in) {
  Reader r(in, kExactMagic);
  r.expect_magic(kExactMagic);
  const Index n = r.size("training size");
  const Index d = r.size("dimension");
  if (n < 2 || d < 1) throw ConfigError("GPEXACT1 file has inconsistent sizes");
  KernelSpec spec = r.spec();
  Dataset data;
  data.x = r.matrix(n, d);
  data.y = r.vector(n);
  Matrix l = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j <= i; ++j) l(i, j) = r.f64();
  }
  data.scaling = r.scaling(d);
  r.expect_end();
  try {
    return ExactGPModel(std::move(data), std::move(spec), Cholesky::from_factor(std::move(l)));
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("GPEXACT1 file is inconsistent: ") + e.what());
  }
}

void save_exact(const std::string& path, const ExactGPModel& model) {
  std::ofstream out = open_out(path);
  write_exact(out, model);
}

ExactGPModel load_exact(const std::string& path) {
  std::ifstream in = open_in(path);
  return read_exact(in);
}

std::string detect_model_format(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string head(9, '\0');
  in.read(head.data(), 9);
  head.resize(static_cast<std::size_t>(in.gcount()));
  if (head.rfind(kDistilledMagic, 0) == 0) return kDistilledMagic;
  if (head.rfind(kExactMagic, 0) == 0) return kExactMagic;
  return "";
}

}  // namespace gpdistill
