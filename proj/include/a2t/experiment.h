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


#ifndef A2T_EXPERIMENT_H_
#define A2T_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "a2t/csv.h"
#include "a2t/mixsim.h"
#include "a2t/toytrain.h"
#include "json.hpp"

namespace a2t {

// Everything a `train` or `sweep` run depends on. JSON keys mirror the
// field names; unknown keys are rejected.
struct ExperimentConfig {
  std::uint64_t seed = 0;
  int num_utterances = 64;
  // Held-out utterances for evaluation; 0 evaluates on the training set.
  int num_test_utterances = 16;
  SamplerOptions scene;
  TrainConfig train;  // train.loss is the objective of the `train` subcommand
  std::vector<BaseMetric> base_metrics = {BaseMetric::kSnr, BaseMetric::kSiSdr};
  std::vector<double> alpha_grid = {0.0, 0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0};
  bool include_baseline = true;
};

// Throws kValidation with the offending key on malformed input.
ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& j);
nlohmann::json ExperimentConfigToJson(const ExperimentConfig& cfg);
ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path);

BaseMetric ParseBaseMetric(const std::string& name);  // "snr" | "sisdr"
std::string BaseMetricKey(BaseMetric metric);          // inverse of the above
InitKind ParseInitKind(const std::string& name);      // "small_random" | ...
std::string InitKindName(InitKind init);
GradientEngine ParseGradientEngine(const std::string& name);  // "second_order" | ...
std::string GradientEngineName(GradientEngine engine);

// Scene i is SampleScene(DeriveSeed(seed, stream_offset + i)).
std::vector<MixtureInstance> GenerateDataset(const SamplerOptions& options,
                                             std::uint64_t seed, int count,
                                             std::uint64_t stream_offset = 0);

// Training and test sets of an experiment; the streams never overlap.
struct ExperimentData {
  std::vector<MixtureInstance> train;
  std::vector<MixtureInstance> test;
  std::span<const MixtureInstance> evaluation() const {
    return test.empty() ? std::span<const MixtureInstance>(train)
                        : std::span<const MixtureInstance>(test);
  }
};
ExperimentData GenerateExperimentData(const ExperimentConfig& cfg);

struct SweepCell {
  LossConfig loss;
  bool ok = true;
  std::string error;  // set when training diverged
  EvaluationTable table;
  std::vector<EpochStats> trace;
  LinearSeparator model{kNumSpeakers, 1};
};

// Trains and evaluates one model for `loss`; divergence is caught and
// recorded in the returned cell.
SweepCell RunCell(const ExperimentConfig& cfg, const ExperimentData& data,
                  const LossConfig& loss);

// Cells in deterministic order: per base metric, the baseline (when
// enabled) followed by A2T at each alpha of the grid.
std::vector<SweepCell> RunSweep(const ExperimentConfig& cfg, const ExperimentData& data);

// Row label such as "SI-SDR+A2T".
std::string ObjectiveLabel(const LossConfig& loss);

// Rows = objective/alpha, columns = overlap buckets + overall, cells =
// "SNR / TSNR / SI-SDR / TSI-SDR".
CsvTable SweepSummaryTable(const std::vector<SweepCell>& cells);
// One numeric row per (cell, bucket or overall).
CsvTable SweepLongTable(const std::vector<SweepCell>& cells);
// Per-utterance rows of one evaluation.
CsvTable EvaluationCsv(const EvaluationTable& table);

}  // namespace a2t

#endif  // A2T_EXPERIMENT_H_
