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

#include "gpdistill/csv.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "gpdistill/error.hpp"
#include "gpdistill/random.hpp"

namespace gpdistill {

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ConfigError("CSV has no column named '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable parse_csv(std::istream& in) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;      // inside a quoted field
  bool was_quoted = false;  // current field started with a quote
  bool any = false;         // current record has content
  std::size_t line = 1;

  const auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    was_quoted = false;
  };
  const auto end_record = [&] {
    end_field();
    // Blank lines are skipped rather than read as one empty field.
    if (!(record.size() == 1 && record[0].empty() && !any)) records.push_back(std::move(record));
    record.clear();
    any = false;
  };

  char c = 0;
  while (in.get(c)) {
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || was_quoted) {
          throw ConfigError("CSV line " + std::to_string(line) + ": stray quote in field");
        }
        quoted = true;
        was_quoted = true;
        any = true;
        break;
      case ',':
        end_field();
        any = true;
        break;
      case '\r':
        if (in.peek() == '\n') break;  // CRLF
        end_record();
        ++line;
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        if (was_quoted) {
          throw ConfigError("CSV line " + std::to_string(line) +
                            ": text after closing quote");
        }
        field.push_back(c);
        any = true;
    }
  }
  if (quoted) throw ConfigError("CSV ends inside a quoted field");
  if (any || !field.empty()) end_record();

  if (records.empty()) throw ConfigError("CSV has no header row");
  CsvTable table;
  table.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size()) {
      throw ConfigError("CSV data row " + std::to_string(r) + " has " +
                        std::to_string(records[r].size()) + " fields, header has " +
                        std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open CSV '" + path + "'");
  return parse_csv(in);
}

namespace {

void write_field(std::ostream& out, const std::string& f) {
  if (f.find_first_of(",\"\r\n") == std::string::npos) {
    out << f;
    return;
  }
  out << '"';
  for (char c : f) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

void write_record(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out << ',';
    write_field(out, fields[i]);
  }
  out << "\r\n";
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& column) {
  const auto fail = [&] {
    return ConfigError("non-numeric value '" + cell + "' at data row " + std::to_string(row) +
                       ", column '" + column + "'");
  };
  const auto first = cell.find_first_not_of(" \t");
  if (first == std::string::npos) throw fail();
  const auto last = cell.find_last_not_of(" \t");
  const std::string trimmed = cell.substr(first, last - first + 1);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(trimmed.c_str(), &end);
  if (end != trimmed.c_str() + trimmed.size() || errno == ERANGE || !std::isfinite(v)) {
    throw fail();
  }
  return v;
}

}  // namespace

void write_csv(std::ostream& out, const CsvTable& table) {
  write_record(out, table.header);
  for (const auto& row : table.rows) write_record(out, row);
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  write_csv(out, table);
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

Matrix numeric_matrix(const CsvTable& table, const std::vector<std::size_t>& skip) {
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (std::find(skip.begin(), skip.end(), c) == skip.end()) keep.push_back(c);
  }
  Matrix out(static_cast<Index>(table.rows.size()), static_cast<Index>(keep.size()));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (std::size_t k = 0; k < keep.size(); ++k) {
      out(static_cast<Index>(r), static_cast<Index>(k)) =
          parse_cell(table.rows[r][keep[k]], r + 1, table.header[keep[k]]);
    }
  }
  return out;
}

TrainTest split_dataset(const Matrix& x, const Vector& y, double split, bool standardize,
                        std::uint64_t seed) {
  const Index n = x.rows();
  if (!(split > 0.0 && split < 1.0)) throw ConfigError("split must lie in (0, 1)");
  if (y.size() != n) throw ConfigError("feature and target row counts differ");
  const auto n_train = static_cast<Index>(std::llround(split * static_cast<double>(n)));
  if (n_train < 2 || n_train >= n) {
    throw ConfigError("split leaves " + std::to_string(n_train) + " training and " +
                      std::to_string(n - n_train) + " test rows; need >= 2 and >= 1");
  }

  // Fisher-Yates with the portable index draw.
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(seed);
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::swap(order[i], order[static_cast<std::size_t>(rng.index(i + 1))]);
  }

  const auto take = [&](Index begin, Index end, Matrix& xs, Vector& ys) {
    xs.resize(end - begin, x.cols());
    ys.resize(end - begin);
    for (Index k = begin; k < end; ++k) {
      xs.row(k - begin) = x.row(order[static_cast<std::size_t>(k)]);
      ys(k - begin) = y(order[static_cast<std::size_t>(k)]);
    }
  };
  Matrix x_train, x_test;
  Vector y_train, y_test;
  take(0, n_train, x_train, y_train);
  take(n_train, n, x_test, y_test);

  const double y_mean = y_train.mean();
  if ((y_train.array() - y_mean).abs().maxCoeff() == 0.0) {
    throw ConfigError("target column is constant on the training split");
  }

  Standardization s = standardize ? Standardization::fit(x_train, y_train)
                                  : Standardization::identity(x.cols());
  TrainTest out;
  out.train.x = s.transform_features(x_train);
  out.train.y = s.transform_target(y_train);
  out.train.scaling = s;
  out.test.x = s.transform_features(x_test);
  out.test.y = s.transform_target(y_test);
  out.test.scaling = s;
  return out;
}

TrainTest load_csv(const std::string& path, const std::string& target_column,
                   bool standardize, std::uint64_t seed, double split) {
  const CsvTable table = read_csv(path);
  const std::size_t target = table.column(target_column);
  if (table.header.size() < 2) throw ConfigError("CSV needs at least one feature column");
  if (table.rows.size() < 3) throw ConfigError("CSV needs at least three data rows");
  const Matrix x = numeric_matrix(table, {target});
  Vector y(static_cast<Index>(table.rows.size()));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    y(static_cast<Index>(r)) = parse_cell(table.rows[r][target], r + 1, target_column);
  }
  return split_dataset(x, y, split, standardize, seed);
}

Dataset load_csv_dataset(const std::string& path, const std::string& target_column,
                         bool standardize) {
  const CsvTable table = read_csv(path);
  const std::size_t target = table.column(target_column);
  if (table.header.size() < 2) throw ConfigError("CSV needs at least one feature column");
  if (table.rows.size() < 2) throw ConfigError("CSV needs at least two data rows");
  const Matrix x = numeric_matrix(table, {target});
  Vector y(static_cast<Index>(table.rows.size()));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    y(static_cast<Index>(r)) = parse_cell(table.rows[r][target], r + 1, target_column);
  }
  if ((y.array() - y.mean()).abs().maxCoeff() == 0.0) {
    throw ConfigError("target column '" + target_column + "' is constant");
  }
  const Standardization s =
      standardize ? Standardization::fit(x, y) : Standardization::identity(x.cols());
  Dataset out;
  out.x = s.transform_features(x);
  out.y = s.transform_target(y);
  out.scaling = s;
  return out;
}

}  // namespace gpdistill
