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

#ifndef GPDISTILL_CSV_HPP_
#define GPDISTILL_CSV_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gpdistill/dataset.hpp"

namespace gpdistill {

// RFC 4180 table: header row plus records, all fields kept as text.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Throws ConfigError if the column does not exist.
  std::size_t column(const std::string& name) const;
};

CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::string& path);
void write_csv(std::ostream& out, const CsvTable& table);
void write_csv(const std::string& path, const CsvTable& table);

// Every cell parsed as a double; errors name the 1-based data row and the
// column. Columns in `skip` are left out of the result.
Matrix numeric_matrix(const CsvTable& table, const std::vector<std::size_t>& skip = {});

struct TrainTest {
  Dataset train;
  Dataset test;
};

// Shuffles rows with the seed, puts round(split * n) of them in train, and
// (when standardize is set) standardizes both parts with train statistics.
TrainTest split_dataset(const Matrix& x, const Vector& y, double split, bool standardize,
                        std::uint64_t seed);

// Reads a numeric CSV and splits it. The target column is removed from
// the features.
TrainTest load_csv(const std::string& path, const std::string& target_column,
                   bool standardize, std::uint64_t seed, double split);

// Whole file as one dataset (no split). Standardization statistics come
// from all rows when `standardize` is set.
Dataset load_csv_dataset(const std::string& path, const std::string& target_column,
                         bool standardize);

}  // namespace gpdistill

#endif  // GPDISTILL_CSV_HPP_
