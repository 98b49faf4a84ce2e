/*
 * Copyright 2026 The mvproc authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef MVPROC_CSV_HPP
#define MVPROC_CSV_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "mvproc/linalg.hpp"

namespace mvproc {

/// Comma-separated table with a mandatory header row. Cells may be numeric
/// or text; numeric access validates on demand.
struct CsvTable {
  std::string source;  // file name for diagnostics
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  Index column_index(const std::string& name) const;  // DataError if absent
  Index row_count() const { return static_cast<Index>(rows.size()); }

  /// Numeric view of the named columns. Missing cells ("", NA, NaN, ?) are
  /// rejected with a row/column diagnostic unless drop_missing, which
  /// removes incomplete rows first (any cell missing drops the whole row).
  /// Non-numeric text in a kept row is always an error.
  Matrix numeric_columns(const std::vector<std::string>& names,
                         bool drop_missing) const;
};

CsvTable read_csv(std::istream& in, const std::string& source);
CsvTable read_csv_file(const std::string& path);

bool is_missing_cell(const std::string& cell);

}  // namespace mvproc

#endif  // MVPROC_CSV_HPP
