// Copyright 2026 The A2T Authors. All Rights Reserved.
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


#include "a2t/csv.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "a2t/error.h"

namespace a2t {
namespace {

bool NeedsQuoting(const std::string& cell) {
  return cell.find_first_of(",\"\n\r") != std::string::npos;
}

std::string Quote(const std::string& cell) {
  if (!NeedsQuoting(cell)) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

bool IsInteger(const std::string& s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool IsFiniteReal(const std::string& s) {
  if (s.empty()) return false;
  std::istringstream in(s);
  double v = 0.0;
  in >> v;
  return !in.fail() && in.eof() && std::isfinite(v);
}

}  // namespace

CsvTable::CsvTable(CsvSchema schema) : schema_(std::move(schema)) {
  if (schema_.name.empty() || schema_.columns.empty()) {
    throw Error(ErrorCode::kValidation, "csv schema needs a name and columns");
  }
}

void CsvTable::AddRow(std::vector<std::string> cells) {
  if (cells.size() != schema_.columns.size()) {
    throw Error(ErrorCode::kValidation,
                "csv " + schema_.name + ": row has " + std::to_string(cells.size()) +
                    " cells, schema has " + std::to_string(schema_.columns.size()));
  }
  rows_.push_back(std::move(cells));
}

void CsvTable::Validate() const {
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    for (std::size_t c = 0; c < rows_[r].size(); ++c) {
      const std::string& cell = rows_[r][c];
      const CsvColumn& col = schema_.columns[c];
      bool ok = true;
      switch (col.type) {
        case CsvColumnType::kText: ok = !cell.empty(); break;
        case CsvColumnType::kInteger: ok = IsInteger(cell); break;
        case CsvColumnType::kReal: ok = cell == kErrorCell || IsFiniteReal(cell); break;
      }
      if (!ok) {
        throw Error(ErrorCode::kValidation,
                    "csv " + schema_.name + ": row " + std::to_string(r) + " column '" +
                        col.name + "' has invalid value '" + cell + "'");
      }
    }
  }
}

std::string CsvTable::ToString() const {
  Validate();
  std::string out = "# a2t-" + schema_.name + " v" + std::to_string(schema_.version) + "\n";
  for (std::size_t c = 0; c < schema_.columns.size(); ++c) {
    if (c) out += ',';
    out += Quote(schema_.columns[c].name);
  }
  out += '\n';
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += Quote(row[c]);
    }
    out += '\n';
  }
  return out;
}

void CsvTable::Write(const std::filesystem::path& path) const {
  const std::string text = ToString();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

std::string FormatReal(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  // Avoid "-0.000000" so equal tables compare equal as text.
  if (std::string(buf) == "-0.000000") return "0.000000";
  return buf;
}

}  // namespace a2t
