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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "a2t/error.h"

namespace a2t {
namespace {

CsvSchema Schema() {
  return {"demo", 2, {{"name"}, {"count", CsvColumnType::kInteger}, {"x", CsvColumnType::kReal}}};
}

TEST(CsvTest, RendersVersionHeaderAndRows) {
  CsvTable t(Schema());
  t.AddRow({"a", "3", "1.500000"});
  t.AddRow({"has,comma", "-1", kErrorCell});
  EXPECT_EQ(t.ToString(),
            "# a2t-demo v2\nname,count,x\na,3,1.500000\n\"has,comma\",-1,error\n");
}

TEST(CsvTest, RejectsWrongArity) {
  CsvTable t(Schema());
  try {
    t.AddRow({"a", "1"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kValidation);
  }
}

TEST(CsvTest, ValidatesCellTypesOnWrite) {
  for (const std::vector<std::string>& bad :
       std::vector<std::vector<std::string>>{{"a", "1.5", "0"}, {"a", "1", "nan"},
                                             {"", "1", "0"}, {"a", "1", "12abc"},
                                             {"a", "1", "inf"}}) {
    CsvTable t(Schema());
    t.AddRow(bad);
    EXPECT_THROW(t.ToString(), Error);
  }
}

TEST(CsvTest, WriteCreatesFileAndReportsBadPaths) {
  CsvTable t(Schema());
  t.AddRow({"q\"uote", "0", "0.000000"});
  const auto path = std::filesystem::path(::testing::TempDir()) / "demo.csv";
  t.Write(path);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), t.ToString());
  EXPECT_NE(ss.str().find("\"q\"\"uote\""), std::string::npos);
  try {
    t.Write("/nonexistent_dir/x.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

TEST(CsvTest, FormatReal) {
  EXPECT_EQ(FormatReal(300.0), "300.000000");
  EXPECT_EQ(FormatReal(-1e-9), "0.000000");
  EXPECT_EQ(FormatReal(-2.5), "-2.500000");
}

}  // namespace
}  // namespace a2t
