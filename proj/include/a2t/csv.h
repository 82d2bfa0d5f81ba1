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


#ifndef A2T_CSV_H_
#define A2T_CSV_H_

#include <filesystem>
#include <string>
#include <vector>

namespace a2t {

enum class CsvColumnType { kText, kInteger, kReal };

struct CsvColumn {
  std::string name;
  CsvColumnType type = CsvColumnType::kText;
};

// A named, versioned column layout. Output starts with a comment line
// "# a2t-<name> v<version>" followed by the header row.
struct CsvSchema {
  std::string name;
  int version = 1;
  std::vector<CsvColumn> columns;
};

// In-memory table validated against its schema when rendered or written.
// Real cells may also hold the literal "error" for failed computations.
class CsvTable {
 public:
  explicit CsvTable(CsvSchema schema);

  const CsvSchema& schema() const { return schema_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  // Throws kValidation when the cell count differs from the column count.
  void AddRow(std::vector<std::string> cells);

  // Throws kValidation on any cell that does not match its column type.
  void Validate() const;
  std::string ToString() const;
  void Write(const std::filesystem::path& path) const;

 private:
  CsvSchema schema_;
  std::vector<std::vector<std::string>> rows_;
};

// Fixed six-decimal rendering used by every numeric CSV cell.
std::string FormatReal(double value);

inline constexpr const char* kErrorCell = "error";

}  // namespace a2t

#endif  // A2T_CSV_H_
