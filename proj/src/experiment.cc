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


#include "a2t/experiment.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "a2t/error.h"
#include "a2t/rng.h"

namespace a2t {
namespace {

// Stream offset separating test scenes from training scenes.
constexpr std::uint64_t kTestStream = 1ULL << 32;

void RejectUnknownKeys(const nlohmann::json& j, const std::set<std::string>& allowed,
                       const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::kValidation, where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) {
      throw Error(ErrorCode::kValidation, "unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
void ReadIf(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

SamplerOptions SceneFromJson(const nlohmann::json& j) {
  RejectUnknownKeys(j,
                    {"sample_rate", "duration_s", "direct_window_ms", "min_absorption",
                     "max_absorption", "max_reflection_order", "speed_of_sound"},
                    "scene");
  SamplerOptions s;
  ReadIf(j, "sample_rate", s.sample_rate);
  ReadIf(j, "duration_s", s.duration_s);
  ReadIf(j, "direct_window_ms", s.direct_window_ms);
  ReadIf(j, "min_absorption", s.min_absorption);
  ReadIf(j, "max_absorption", s.max_absorption);
  ReadIf(j, "max_reflection_order", s.max_reflection_order);
  ReadIf(j, "speed_of_sound", s.speed_of_sound);
  return s;
}

LossConfig LossFromJson(const nlohmann::json& j) {
  RejectUnknownKeys(j, {"base_metric", "a2t", "alpha", "pit"}, "loss");
  LossConfig loss;
  if (j.contains("base_metric")) loss.base_metric = ParseBaseMetric(j.at("base_metric"));
  ReadIf(j, "a2t", loss.use_a2t);
  ReadIf(j, "alpha", loss.alpha);
  ReadIf(j, "pit", loss.pit);
  return loss;
}

nlohmann::json LossToJson(const LossConfig& loss) {
  return {{"base_metric", BaseMetricKey(loss.base_metric)},
          {"a2t", loss.use_a2t},
          {"alpha", loss.alpha},
          {"pit", loss.pit}};
}

void ValidateExperiment(const ExperimentConfig& cfg) {
  if (cfg.num_utterances < 1) {
    throw Error(ErrorCode::kValidation, "num_utterances must be at least 1");
  }
  if (cfg.num_test_utterances < 0) {
    throw Error(ErrorCode::kValidation, "num_test_utterances must be non-negative");
  }
  if (cfg.scene.direct_window_ms != 6.0 && cfg.scene.direct_window_ms != 20.0) {
    throw Error(ErrorCode::kValidation, "direct_window_ms must be 6 or 20");
  }
  if (cfg.scene.sample_rate <= 0 || !(cfg.scene.duration_s > 0.0)) {
    throw Error(ErrorCode::kValidation, "scene sample_rate and duration_s must be positive");
  }
  if (cfg.base_metrics.empty()) {
    throw Error(ErrorCode::kValidation, "base_metrics must not be empty");
  }
  for (double a : cfg.alpha_grid) {
    if (!(a >= 0.0) || !std::isfinite(a)) {
      throw Error(ErrorCode::kValidation, "alpha_grid values must be finite and >= 0");
    }
  }
  if (!(cfg.train.loss.alpha >= 0.0)) {
    throw Error(ErrorCode::kValidation, "loss.alpha must be >= 0");
  }
  if (!(cfg.train.grad_clip_l2 > 0.0) || !(cfg.train.learning_rate > 0.0) ||
      cfg.train.batch_size < 1 || cfg.train.epochs < 0 || cfg.train.filter_length < 1) {
    throw Error(ErrorCode::kValidation, "invalid train settings");
  }
}

// Compact form for display: "0.3" rather than "0.300000".
std::string AlphaLabel(double alpha) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", alpha);
  return buf;
}

std::string Cell(const MetricMeans& m) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%.2f / %.2f / %.2f / %.2f", m.snr, m.tsnr, m.si_sdr,
                m.tsi_sdr);
  return buf;
}

}  // namespace

BaseMetric ParseBaseMetric(const std::string& name) {
  if (name == "snr") return BaseMetric::kSnr;
  if (name == "sisdr") return BaseMetric::kSiSdr;
  throw Error(ErrorCode::kValidation, "unknown metric '" + name + "' (snr|sisdr)");
}

std::string BaseMetricKey(BaseMetric metric) {
  return metric == BaseMetric::kSnr ? "snr" : "sisdr";
}

InitKind ParseInitKind(const std::string& name) {
  if (name == "small_random") return InitKind::kSmallRandom;
  if (name == "identity_plus_noise") return InitKind::kIdentityPlusNoise;
  throw Error(ErrorCode::kValidation,
              "unknown init '" + name + "' (small_random|identity_plus_noise)");
}

std::string InitKindName(InitKind init) {
  return init == InitKind::kSmallRandom ? "small_random" : "identity_plus_noise";
}

GradientEngine ParseGradientEngine(const std::string& name) {
  if (name == "second_order") return GradientEngine::kSecondOrder;
  if (name == "time_domain") return GradientEngine::kTimeDomain;
  throw Error(ErrorCode::kValidation,
              "unknown engine '" + name + "' (second_order|time_domain)");
}

std::string GradientEngineName(GradientEngine engine) {
  return engine == GradientEngine::kSecondOrder ? "second_order" : "time_domain";
}

ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& j) {
  try {
    RejectUnknownKeys(j,
                      {"seed", "num_utterances", "num_test_utterances", "scene", "train",
                       "loss", "base_metrics", "alpha_grid", "include_baseline"},
                      "experiment config");
    ExperimentConfig cfg;
    ReadIf(j, "seed", cfg.seed);
    ReadIf(j, "num_utterances", cfg.num_utterances);
    ReadIf(j, "num_test_utterances", cfg.num_test_utterances);
    if (j.contains("scene")) cfg.scene = SceneFromJson(j.at("scene"));
    cfg.train.seed = cfg.seed;
    if (j.contains("train")) {
      const nlohmann::json& t = j.at("train");
      RejectUnknownKeys(t,
                        {"learning_rate", "epochs", "grad_clip_l2", "batch_size", "init",
                         "filter_length", "seed", "engine"},
                        "train");
      ReadIf(t, "learning_rate", cfg.train.learning_rate);
      ReadIf(t, "epochs", cfg.train.epochs);
      ReadIf(t, "grad_clip_l2", cfg.train.grad_clip_l2);
      ReadIf(t, "batch_size", cfg.train.batch_size);
      ReadIf(t, "filter_length", cfg.train.filter_length);
      ReadIf(t, "seed", cfg.train.seed);
      if (t.contains("init")) cfg.train.init = ParseInitKind(t.at("init"));
      if (t.contains("engine")) cfg.train.engine = ParseGradientEngine(t.at("engine"));
    }
    if (j.contains("loss")) cfg.train.loss = LossFromJson(j.at("loss"));
    if (j.contains("base_metrics")) {
      cfg.base_metrics.clear();
      for (const auto& m : j.at("base_metrics")) cfg.base_metrics.push_back(ParseBaseMetric(m));
    }
    ReadIf(j, "alpha_grid", cfg.alpha_grid);
    ReadIf(j, "include_baseline", cfg.include_baseline);
    ValidateExperiment(cfg);
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kValidation, std::string("experiment config: ") + e.what());
  }
}

nlohmann::json ExperimentConfigToJson(const ExperimentConfig& cfg) {
  nlohmann::json metrics = nlohmann::json::array();
  for (BaseMetric m : cfg.base_metrics) metrics.push_back(BaseMetricKey(m));
  return {
      {"seed", cfg.seed},
      {"num_utterances", cfg.num_utterances},
      {"num_test_utterances", cfg.num_test_utterances},
      {"scene",
       {{"sample_rate", cfg.scene.sample_rate},
        {"duration_s", cfg.scene.duration_s},
        {"direct_window_ms", cfg.scene.direct_window_ms},
        {"min_absorption", cfg.scene.min_absorption},
        {"max_absorption", cfg.scene.max_absorption},
        {"max_reflection_order", cfg.scene.max_reflection_order},
        {"speed_of_sound", cfg.scene.speed_of_sound}}},
      {"train",
       {{"learning_rate", cfg.train.learning_rate},
        {"epochs", cfg.train.epochs},
        {"grad_clip_l2", cfg.train.grad_clip_l2},
        {"batch_size", cfg.train.batch_size},
        {"init", InitKindName(cfg.train.init)},
        {"filter_length", cfg.train.filter_length},
        {"seed", cfg.train.seed},
        {"engine", GradientEngineName(cfg.train.engine)}}},
      {"loss", LossToJson(cfg.train.loss)},
      {"base_metrics", metrics},
      {"alpha_grid", cfg.alpha_grid},
      {"include_baseline", cfg.include_baseline},
  };
}

ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kValidation, path.string() + ": " + e.what());
  }
  return ExperimentConfigFromJson(j);
}

std::vector<MixtureInstance> GenerateDataset(const SamplerOptions& options,
                                             std::uint64_t seed, int count,
                                             std::uint64_t stream_offset) {
  std::vector<MixtureInstance> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const std::uint64_t scene_seed = DeriveSeed(seed, stream_offset + i);
    out.push_back(RenderScene(SampleScene(scene_seed, options)));
  }
  return out;
}

ExperimentData GenerateExperimentData(const ExperimentConfig& cfg) {
  ExperimentData data;
  data.train = GenerateDataset(cfg.scene, cfg.seed, cfg.num_utterances);
  data.test = GenerateDataset(cfg.scene, cfg.seed, cfg.num_test_utterances, kTestStream);
  return data;
}

SweepCell RunCell(const ExperimentConfig& cfg, const ExperimentData& data,
                  const LossConfig& loss) {
  TrainConfig tc = cfg.train;
  tc.loss = loss;
  SweepCell cell;
  cell.loss = loss;
  cell.model = InitSeparator(kNumSpeakers, tc.filter_length, tc.init, tc.seed);
  try {
    TrainReport report = Train(cell.model, data.train, tc);
    cell.trace = std::move(report.trace);
    cell.table = data.test.empty() ? std::move(report.table)
                                   : Evaluate(cell.model, data.test, loss.base_metric);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDivergence) throw;
    cell.ok = false;
    cell.error = e.what();
  }
  return cell;
}

std::vector<SweepCell> RunSweep(const ExperimentConfig& cfg, const ExperimentData& data) {
  std::vector<SweepCell> cells;
  for (BaseMetric metric : cfg.base_metrics) {
    LossConfig loss = cfg.train.loss;
    loss.base_metric = metric;
    if (cfg.include_baseline) {
      loss.use_a2t = false;
      loss.alpha = 0.0;
      cells.push_back(RunCell(cfg, data, loss));
    }
    for (double alpha : cfg.alpha_grid) {
      loss.use_a2t = true;
      loss.alpha = alpha;
      cells.push_back(RunCell(cfg, data, loss));
    }
  }
  return cells;
}

std::string ObjectiveLabel(const LossConfig& loss) {
  return std::string(BaseMetricName(loss.base_metric)) + (loss.use_a2t ? "+A2T" : "");
}

CsvTable SweepSummaryTable(const std::vector<SweepCell>& cells) {
  CsvSchema schema{"sweep-table", 1, {{"objective"}, {"alpha"}}};
  for (int b = 0; b < kNumOverlapBuckets; ++b) {
    schema.columns.push_back({std::string(OverlapBucketName(static_cast<OverlapBucket>(b)))});
  }
  schema.columns.push_back({"overall"});
  CsvTable table(schema);
  for (const SweepCell& cell : cells) {
    std::vector<std::string> row = {ObjectiveLabel(cell.loss),
                                    cell.loss.use_a2t ? AlphaLabel(cell.loss.alpha) : "-"};
    for (int b = 0; b <= kNumOverlapBuckets; ++b) {
      if (!cell.ok) {
        row.push_back("diverged");
        continue;
      }
      const MetricMeans& m =
          b < kNumOverlapBuckets ? cell.table.buckets[b] : cell.table.overall;
      row.push_back(m.count ? Cell(m) : "n/a");
    }
    table.AddRow(std::move(row));
  }
  return table;
}

CsvTable SweepLongTable(const std::vector<SweepCell>& cells) {
  CsvTable table({"sweep-long",
                  1,
                  {{"objective"},
                   {"a2t"},
                   {"alpha", CsvColumnType::kReal},
                   {"group"},
                   {"count", CsvColumnType::kInteger},
                   {"snr", CsvColumnType::kReal},
                   {"tsnr", CsvColumnType::kReal},
                   {"si_sdr", CsvColumnType::kReal},
                   {"tsi_sdr", CsvColumnType::kReal},
                   {"status"}}});
  for (const SweepCell& cell : cells) {
    for (int b = 0; b <= kNumOverlapBuckets; ++b) {
      const bool overall = b == kNumOverlapBuckets;
      const MetricMeans& m = overall ? cell.table.overall : cell.table.buckets[b];
      std::vector<std::string> row = {
          std::string(BaseMetricName(cell.loss.base_metric)),
          cell.loss.use_a2t ? "on" : "off",
          FormatReal(cell.loss.alpha),
          overall ? "overall" : std::string(OverlapBucketName(static_cast<OverlapBucket>(b))),
          std::to_string(m.count)};
      const bool have = cell.ok && m.count > 0;
      for (double v : {m.snr, m.tsnr, m.si_sdr, m.tsi_sdr}) {
        row.push_back(have ? FormatReal(v) : kErrorCell);
      }
      row.push_back(cell.ok ? "ok" : "diverged: " + cell.error);
      table.AddRow(std::move(row));
    }
  }
  return table;
}

CsvTable EvaluationCsv(const EvaluationTable& eval) {
  CsvTable table({"evaluation",
                  1,
                  {{"utterance_id", CsvColumnType::kInteger},
                   {"overlap_bucket"},
                   {"snr", CsvColumnType::kReal},
                   {"tsnr", CsvColumnType::kReal},
                   {"si_sdr", CsvColumnType::kReal},
                   {"tsi_sdr", CsvColumnType::kReal}}});
  for (const UtteranceMetrics& u : eval.utterances) {
    table.AddRow({std::to_string(u.index), std::string(OverlapBucketName(u.bucket)),
                  FormatReal(u.values.snr), FormatReal(u.values.tsnr),
                  FormatReal(u.values.si_sdr), FormatReal(u.values.tsi_sdr)});
  }
  return table;
}

}  // namespace a2t
