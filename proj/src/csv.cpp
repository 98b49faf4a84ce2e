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

#include "mvproc/csv.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mvproc/errors.hpp"

namespace mvproc {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    cells.push_back(trim(cell));
  }
  if (!line.empty() && line.back() == ',') {
    cells.push_back("");
  }
  return cells;
}

}  // namespace

bool is_missing_cell(const std::string& cell) {
  if (cell.empty() || cell == "?") return true;
  std::string lower(cell);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return lower == "na" || lower == "nan" || lower == "n/a" || lower == "null";
}

CsvTable read_csv(std::istream& in, const std::string& source) {
  CsvTable table;
  table.source = source;
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError(source + ": empty file (header row required)");
  }
  table.columns = split_line(line);
  if (table.columns.empty()) {
    throw DataError(source + ": header row has no columns");
  }

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split_line(line);
    if (cells.size() != table.columns.size()) {
      std::ostringstream msg;
      msg << source << ": line " << line_no << " has " << cells.size()
          << " cells, expected " << table.columns.size();
      throw DataError(msg.str());
    }
    table.rows.push_back(std::move(cells));
  }
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open CSV file: " + path);
  }
  return read_csv(in, path);
}

Index CsvTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return static_cast<Index>(i);
  }
  std::ostringstream msg;
  msg << source << ": column '" << name << "' not found (available:";
  for (const auto& c : columns) msg << ' ' << c;
  msg << ')';
  throw DataError(msg.str());
}

Matrix CsvTable::numeric_columns(const std::vector<std::string>& names,
                                 bool drop_missing) const {
  std::vector<Index> idx;
  idx.reserve(names.size());
  for (const auto& name : names) idx.push_back(column_index(name));

  std::vector<std::size_t> kept;
  kept.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    bool missing = false;
    for (const Index c : idx) {
      if (is_missing_cell(rows[r][static_cast<std::size_t>(c)])) {
        if (!drop_missing) {
          std::ostringstream msg;
          msg << source << ": missing value at data row " << (r + 1)
              << ", column '" << columns[static_cast<std::size_t>(c)] << "'";
          throw DataError(msg.str());
        }
        missing = true;
        break;
      }
    }
    if (!missing) kept.push_back(r);
  }

  Matrix out(static_cast<Index>(kept.size()), static_cast<Index>(idx.size()));
  for (std::size_t r = 0; r < kept.size(); ++r) {
    for (std::size_t c = 0; c < idx.size(); ++c) {
      const std::string& cell = rows[kept[r]][static_cast<std::size_t>(idx[c])];
      const char* begin = cell.c_str();
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin || *end != '\0') {
        std::ostringstream msg;
        msg << source << ": non-numeric cell '" << cell << "' at data row "
            << (kept[r] + 1) << ", column '"
            << columns[static_cast<std::size_t>(idx[c])] << "'";
        throw DataError(msg.str());
      }
      out(static_cast<Index>(r), static_cast<Index>(c)) = v;
    }
  }
  return out;
}

}  // namespace mvproc
