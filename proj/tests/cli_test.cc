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


// Drives the built `a2t` binary end to end.

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "a2t/metrics.h"
#include "a2t/wav_io.h"
#include "json.hpp"

namespace a2t {
namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult RunCli(const std::string& args) {
  const std::string cmd = std::string(A2T_CLI_PATH) + " " + args + " 2>/dev/null";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> ParseCsv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells(1);
    bool quoted = false;
    for (char ch : line) {
      if (ch == '"') {
        quoted = !quoted;
      } else if (ch == ',' && !quoted) {
        cells.emplace_back();
      } else {
        cells.back() += ch;
      }
    }
    rows.push_back(cells);
  }
  return rows;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(::testing::TempDir()) /
           ("a2t_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    config_ = dir_ / "config.json";
    std::ofstream(config_) << R"({"seed": 4, "num_utterances": 4, "num_test_utterances": 2,
      "scene": {"sample_rate": 8000, "duration_s": 0.5},
      "train": {"epochs": 5, "filter_length": 32},
      "alpha_grid": [0.3]})";
  }
  fs::path dir_;
  fs::path config_;
};

TEST_F(CliTest, SimulateIsDeterministicWithManifest) {
  ASSERT_EQ(RunCli("simulate --config " + config_.string() + " --out " + (dir_ / "a").string()).exit_code, 0);
  ASSERT_EQ(RunCli("simulate --config " + config_.string() + " --out " + (dir_ / "b").string()).exit_code, 0);
  const nlohmann::json manifest = nlohmann::json::parse(Slurp(dir_ / "a" / "manifest.json"));
  ASSERT_EQ(manifest["utterances"].size(), 4u);
  int total = 0;
  for (const auto& [k, v] : manifest["bucket_counts"].items()) total += v.get<int>();
  EXPECT_EQ(total, 4);
  for (const auto& u : manifest["utterances"]) {
    const std::string id = u["id"];
    for (const char* f : {"mix.wav", "src1.wav", "src2.wav", "src1_direct.wav", "src2_direct.wav",
                          "src1_late.wav", "src2_late.wav", "noise.wav"}) {
      const std::string a = Slurp(dir_ / "a" / id / f);
      ASSERT_FALSE(a.empty()) << id << "/" << f;
      EXPECT_EQ(a, Slurp(dir_ / "b" / id / f)) << id << "/" << f;
    }
  }
}

TEST_F(CliTest, MetricsClampAndScaleSplit) {
  const Waveform x({0.5, -0.25, 0.125, 0.75}, 8000);
  WriteMonoWav(dir_ / "x.wav", x);
  WriteMonoWav(dir_ / "x2.wav", Scale(x, 2.0));
  const RunResult same = RunCli("metrics --estimates " + (dir_ / "x.wav").string() + " --references " +
                             (dir_ / "x.wav").string());
  ASSERT_EQ(same.exit_code, 0);
  auto rows = ParseCsv(same.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1][2], "300.000000");
  const RunResult scaled = RunCli("metrics --estimates " + (dir_ / "x2.wav").string() +
                               " --references " + (dir_ / "x.wav").string());
  rows = ParseCsv(scaled.out);
  EXPECT_EQ(rows[1][3], "300.000000");
  EXPECT_EQ(rows[1][2], "0.000000");
}

TEST_F(CliTest, MetricsLengthMismatchGivesErrorRow) {
  WriteMonoWav(dir_ / "a.wav", Waveform({0.5, 0.1, 0.2}, 8000));
  WriteMonoWav(dir_ / "b.wav", Waveform({0.5, 0.1}, 8000));
  const RunResult r = RunCli("metrics --estimates " + (dir_ / "a.wav").string() + " " +
                          (dir_ / "a.wav").string() + " --references " +
                          (dir_ / "b.wav").string() + " " + (dir_ / "a.wav").string());
  EXPECT_NE(r.exit_code, 0);
  const auto rows = ParseCsv(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1][2], "error");
  EXPECT_EQ(rows[2][2], "300.000000");
}

TEST_F(CliTest, ValidationErrorsExitWithTwo) {
  std::ofstream(dir_ / "bad.json") << R"({"alpha_grid": [-1]})";
  EXPECT_EQ(RunCli("sweep --config " + (dir_ / "bad.json").string() + " --out " + dir_.string()).exit_code, 2);
  EXPECT_EQ(RunCli("train --config " + config_.string() + " --window-ms 7 --out " + dir_.string()).exit_code, 2);
  EXPECT_EQ(RunCli("train --config " + config_.string() + " --a2t maybe --out " + dir_.string()).exit_code, 2);
  EXPECT_EQ(RunCli("nosuchcommand").exit_code, 2);
  EXPECT_EQ(RunCli("metrics --estimates /nonexistent.wav --references /nonexistent.wav").exit_code, 2);
}

TEST_F(CliTest, ContourEmitsBothContours) {
  const RunResult r = RunCli("contour --seed 3 --points 5");
  ASSERT_EQ(r.exit_code, 0);
  const auto rows = ParseCsv(r.out);
  ASSERT_EQ(rows.size(), 1u + 3u + 5u);
  EXPECT_EQ(rows[0][1], "label");
  EXPECT_EQ(rows[1][1], "direct_path");
}

TEST_F(CliTest, TrainedBaselineAgreesWithMetricsSubcommand) {
  const fs::path out = dir_ / "train";
  ASSERT_EQ(RunCli("train --config " + config_.string() + " --a2t off --write-estimates --out " +
                out.string())
                .exit_code,
            0);
  EXPECT_TRUE(fs::exists(out / "model.json"));
  EXPECT_TRUE(fs::exists(out / "trace.json"));
  const auto eval = ParseCsv(Slurp(out / "evaluation.csv"));
  ASSERT_EQ(eval.size(), 3u);
  for (std::size_t u = 0; u < 2; ++u) {
    const fs::path d = out / "estimates" / (u == 0 ? "utt_0000" : "utt_0001");
    const RunResult r = RunCli("metrics --estimates " + (d / "est1.wav").string() + " " +
                            (d / "est2.wav").string() + " --references " +
                            (d / "ref1.wav").string() + " " + (d / "ref2.wav").string() +
                            " --mapped " + (d / "mapped1.wav").string() + " " +
                            (d / "mapped2.wav").string() + " --direct " +
                            (d / "direct1.wav").string() + " " + (d / "direct2.wav").string());
    ASSERT_EQ(r.exit_code, 0);
    const auto rows = ParseCsv(r.out);
    ASSERT_EQ(rows.size(), 3u);
    for (int col : {2, 4}) {
      const double mean = (std::stod(rows[1][col]) + std::stod(rows[2][col])) / 2.0;
      const int eval_col = col == 2 ? 2 : 3;
      EXPECT_NEAR(mean, std::stod(eval[u + 1][eval_col]), 1e-4) << "column " << col;
    }
  }
}

TEST_F(CliTest, SweepWritesTables) {
  const fs::path out = dir_ / "sweep";
  const RunResult r = RunCli("sweep --config " + config_.string() + " --metric snr --out " + out.string());
  ASSERT_EQ(r.exit_code, 0);
  const auto rows = ParseCsv(Slurp(out / "sweep_table.csv"));
  ASSERT_EQ(rows.size(), 3u);  // header, baseline, alpha 0.3
  EXPECT_EQ(rows[1][0], "SNR");
  EXPECT_EQ(rows[2][0], "SNR+A2T");
  EXPECT_TRUE(fs::exists(out / "sweep_long.csv"));
  const RunResult again =
      RunCli("sweep --config " + config_.string() + " --metric snr --out " + (dir_ / "s2").string());
  EXPECT_EQ(Slurp(out / "sweep_long.csv"), Slurp(dir_ / "s2" / "sweep_long.csv"));
}

}  // namespace
}  // namespace a2t
