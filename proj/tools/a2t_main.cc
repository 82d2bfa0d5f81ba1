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


// Command-line entry point: simulate, metrics, contour, train and sweep.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "a2t/contour.h"
#include "a2t/csv.h"
#include "a2t/error.h"
#include "a2t/experiment.h"
#include "a2t/metrics.h"
#include "a2t/mixsim.h"
#include "a2t/toytrain.h"
#include "a2t/wav_io.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace a2t {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

// Flags shared by the config-driven subcommands; unset flags leave the
// config untouched.
struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::vector<double> alphas;
  std::optional<double> window_ms;
  std::optional<std::string> metric;
  std::optional<std::string> a2t;
};

void AddOverrideFlags(CLI::App* cmd, Overrides& o, bool require_config) {
  auto* c = cmd->add_option("--config", o.config, "Experiment config (JSON)");
  if (require_config) c->required();
  cmd->add_option("--seed", o.seed, "Base seed");
  cmd->add_option("--window-ms", o.window_ms, "Direct-path half window, 6 or 20 ms");
}

ExperimentConfig ResolveConfig(const Overrides& o) {
  ExperimentConfig cfg;
  if (!o.config.empty()) cfg = LoadExperimentConfig(o.config);
  nlohmann::json j = ExperimentConfigToJson(cfg);
  if (o.seed) {
    j["seed"] = *o.seed;
    j["train"]["seed"] = *o.seed;
  }
  if (o.window_ms) j["scene"]["direct_window_ms"] = *o.window_ms;
  if (o.metric) {
    ParseBaseMetric(*o.metric);
    j["loss"]["base_metric"] = *o.metric;
    j["base_metrics"] = {*o.metric};
  }
  if (o.a2t) {
    if (*o.a2t != "on" && *o.a2t != "off") {
      throw Error(ErrorCode::kValidation, "--a2t must be on or off");
    }
    j["loss"]["a2t"] = *o.a2t == "on";
  }
  if (!o.alphas.empty()) {
    j["alpha_grid"] = o.alphas;
    j["loss"]["alpha"] = o.alphas.front();
  }
  return ExperimentConfigFromJson(j);  // re-validates the overridden values
}

void WriteJson(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out << j.dump(2) << "\n";
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

void EnsureDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
}

std::string UtteranceId(int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "utt_%04d", i);
  return buf;
}

int RunSimulate(const Overrides& o, const std::string& out_dir) {
  const ExperimentConfig cfg = ResolveConfig(o);
  const fs::path root(out_dir);
  EnsureDir(root);
  nlohmann::json utterances = nlohmann::json::array();
  std::array<int, kNumOverlapBuckets> counts{};
  const std::vector<MixtureInstance> data =
      GenerateDataset(cfg.scene, cfg.seed, cfg.num_utterances);
  for (int i = 0; i < cfg.num_utterances; ++i) {
    const MixtureInstance& m = data[i];
    const std::string id = UtteranceId(i);
    const fs::path dir = root / id;
    EnsureDir(dir);
    WriteMonoWav(dir / "mix.wav", m.mixture);
    for (int s = 0; s < kNumSpeakers; ++s) {
      const std::string p = "src" + std::to_string(s + 1);
      WriteMonoWav(dir / (p + ".wav"), m.reverberant_targets[s]);
      WriteMonoWav(dir / (p + "_direct.wav"), m.direct_targets[s]);
      WriteMonoWav(dir / (p + "_late.wav"), m.late_targets[s]);
    }
    WriteMonoWav(dir / "noise.wav", m.noise);
    ++counts[static_cast<int>(m.overlap_bucket)];
    utterances.push_back({{"id", id},
                          {"num_samples", m.mixture.size()},
                          {"overlap_bucket", std::string(OverlapBucketName(m.overlap_bucket))},
                          {"scene", SceneSpecToJson(m.spec)}});
  }
  nlohmann::json bucket_counts;
  for (int b = 0; b < kNumOverlapBuckets; ++b) {
    bucket_counts[std::string(OverlapBucketName(static_cast<OverlapBucket>(b)))] = counts[b];
  }
  WriteJson(root / "manifest.json", {{"schema", "a2t-manifest"},
                                     {"version", 1},
                                     {"config", ExperimentConfigToJson(cfg)},
                                     {"bucket_counts", bucket_counts},
                                     {"utterances", utterances}});
  std::cout << "wrote " << cfg.num_utterances << " utterances to " << root.string() << "\n";
  return kExitOk;
}

struct MetricsArgs {
  std::vector<std::string> estimates, references, mapped, directs;
};

int RunMetrics(const MetricsArgs& a) {
  if (a.estimates.size() != a.references.size()) {
    throw Error(ErrorCode::kArity, "--estimates and --references differ in count");
  }
  const bool targets = !a.directs.empty() || !a.mapped.empty();
  if (targets && (a.mapped.size() != a.estimates.size() ||
                  a.directs.size() != a.estimates.size())) {
    throw Error(ErrorCode::kArity, "--mapped and --direct must match --estimates in count");
  }
  CsvTable table({"metrics",
                  1,
                  {{"estimate"},
                   {"reference"},
                   {"snr", CsvColumnType::kReal},
                   {"si_sdr", CsvColumnType::kReal},
                   {"tsnr", CsvColumnType::kReal},
                   {"tsi_sdr", CsvColumnType::kReal},
                   {"status"}}});
  int exit_code = kExitOk;
  for (std::size_t i = 0; i < a.estimates.size(); ++i) {
    std::vector<std::string> row = {a.estimates[i], a.references[i]};
    try {
      const Waveform est = ReadMonoWav(a.estimates[i]);
      const Waveform ref = ReadMonoWav(a.references[i]);
      row.push_back(FormatReal(Snr(est, ref).clamped_db()));
      row.push_back(FormatReal(SiSdr(est, ref).clamped_db()));
      if (targets) {
        const Waveform mapped = ReadMonoWav(a.mapped[i]);
        const Waveform direct = ReadMonoWav(a.directs[i]);
        row.push_back(FormatReal(Tsnr(mapped, direct).clamped_db()));
        row.push_back(FormatReal(TsiSdr(mapped, direct).clamped_db()));
      } else {
        row.push_back(kErrorCell);
        row.push_back(kErrorCell);
      }
      row.push_back(targets ? "ok" : "ok (no direct references)");
    } catch (const Error& e) {
      row.resize(2);
      for (int k = 0; k < 4; ++k) row.push_back(kErrorCell);
      row.push_back(e.what());
      const int code = e.is_numerical() ? kExitNumerical : kExitValidation;
      exit_code = std::max(exit_code, code);
    }
    table.AddRow(std::move(row));
  }
  std::cout << table.ToString();
  return exit_code;
}

struct ContourArgs {
  std::string direct, late, out;
  std::uint64_t seed = 0;
  int cone_points = 6;
  double window_ms = 6.0;
};

int RunContour(const ContourArgs& a) {
  Waveform direct, late;
  if (!a.direct.empty() || !a.late.empty()) {
    if (a.direct.empty() || a.late.empty()) {
      throw Error(ErrorCode::kValidation, "--direct and --late go together");
    }
    direct = ReadMonoWav(a.direct);
    late = ReadMonoWav(a.late);
  } else {
    SamplerOptions opts;
    opts.duration_s = 1.0;
    opts.direct_window_ms = a.window_ms;
    const MixtureInstance m = RenderScene(SampleScene(a.seed, opts));
    direct = m.direct_targets[0];
    late = m.late_targets[0];
  }
  CsvTable table({"contour",
                  1,
                  {{"contour"},
                   {"label"},
                   {"metric_value_db", CsvColumnType::kReal},
                   {"tsnr_db", CsvColumnType::kReal},
                   {"tsi_sdr_db", CsvColumnType::kReal}}});
  const auto emit = [&](const char* name, const ContourSet& set) {
    for (const ContourPoint& p : set.points) {
      table.AddRow({name, std::string(ContourLabelName(p.label)),
                    FormatReal(p.metric_value.clamped_db()), FormatReal(p.tsnr.clamped_db()),
                    FormatReal(p.tsi_sdr.clamped_db())});
    }
  };
  emit("snr", SnrContourPoints(direct, late));
  emit("sisdr", SiSdrContourPoints(direct, late, a.cone_points));
  if (a.out.empty()) {
    std::cout << table.ToString();
  } else {
    table.Write(a.out);
  }
  return kExitOk;
}

// Outputs of the trained model on the evaluation set, each next to the
// reverberant target it was scored against.
void WriteEstimates(const fs::path& root, const LinearSeparator& model,
                    std::span<const MixtureInstance> data, const EvaluationTable& table) {
  for (std::size_t u = 0; u < data.size(); ++u) {
    const fs::path dir = root / UtteranceId(static_cast<int>(u));
    EnsureDir(dir);
    const std::vector<Waveform> est = model.Forward(data[u].mixture);
    for (int j = 0; j < kNumSpeakers; ++j) {
      const int k = table.utterances[u].permutation[j];
      const std::string s = std::to_string(j + 1);
      WriteMonoWav(dir / ("est" + s + ".wav"), est[j]);
      WriteMonoWav(dir / ("ref" + s + ".wav"), data[u].reverberant_targets[k]);
      WriteMonoWav(dir / ("mapped" + s + ".wav"),
                   model.ForwardSource(j, data[u].direct_targets[k]));
      WriteMonoWav(dir / ("direct" + s + ".wav"), data[u].direct_targets[k]);
    }
  }
}

int RunTrain(const Overrides& o, const std::string& out_dir, bool write_estimates) {
  const ExperimentConfig cfg = ResolveConfig(o);
  const fs::path root(out_dir);
  EnsureDir(root);
  const ExperimentData data = GenerateExperimentData(cfg);
  LinearSeparator model = InitSeparator(kNumSpeakers, cfg.train.filter_length,
                                        cfg.train.init, cfg.train.seed);
  TrainReport report = Train(model, data.train, cfg.train);
  if (!data.test.empty()) {
    report.table = Evaluate(model, data.test, cfg.train.loss.base_metric);
  }
  WriteJson(root / "model.json", model.ToJson());
  nlohmann::json trace = TrainReportTraceJson(report);
  trace["config"] = ExperimentConfigToJson(cfg);
  WriteJson(root / "trace.json", trace);
  EvaluationCsv(report.table).Write(root / "evaluation.csv");
  if (write_estimates) {
    WriteEstimates(root / "estimates", model, data.evaluation(), report.table);
  }
  SweepCell cell;
  cell.loss = cfg.train.loss;
  cell.table = report.table;
  SweepSummaryTable({cell}).Write(root / "table.csv");
  std::cout << SweepSummaryTable({cell}).ToString();
  return kExitOk;
}

int RunSweepCommand(const Overrides& o, const std::string& out_dir) {
  const ExperimentConfig cfg = ResolveConfig(o);
  const fs::path root(out_dir);
  EnsureDir(root);
  const ExperimentData data = GenerateExperimentData(cfg);
  const std::vector<SweepCell> cells = RunSweep(cfg, data);
  SweepSummaryTable(cells).Write(root / "sweep_table.csv");
  SweepLongTable(cells).Write(root / "sweep_long.csv");
  WriteJson(root / "config.json", ExperimentConfigToJson(cfg));
  std::cout << SweepSummaryTable(cells).ToString();
  return kExitOk;
}

int Main(int argc, char** argv) {
  CLI::App app{"Reverberant separation objectives, A2T loss and toy experiments"};
  app.require_subcommand(1);

  Overrides sim_o, train_o, sweep_o;
  std::string sim_out, train_out, sweep_out;

  auto* sim = app.add_subcommand("simulate", "Render a dataset of mixtures to WAV files");
  AddOverrideFlags(sim, sim_o, false);
  sim->add_option("--out", sim_out, "Output directory")->required();

  MetricsArgs metrics_args;
  auto* met = app.add_subcommand("metrics", "SNR, SI-SDR, TSNR and TSI-SDR of WAV files");
  met->add_option("--estimates", metrics_args.estimates, "Estimate WAVs")->required();
  met->add_option("--references", metrics_args.references, "Reference WAVs")->required();
  met->add_option("--mapped", metrics_args.mapped, "Mapped direct paths T(x_d)");
  met->add_option("--direct", metrics_args.directs, "Direct-path references x_d");

  ContourArgs contour_args;
  auto* con = app.add_subcommand("contour", "Equal-valued contour exemplars as CSV");
  con->add_option("--direct", contour_args.direct, "Direct-path WAV");
  con->add_option("--late", contour_args.late, "Late-reverberation WAV");
  con->add_option("--seed", contour_args.seed, "Scene seed when no WAVs are given");
  con->add_option("--window-ms", contour_args.window_ms, "Direct-path half window")
      ->check(CLI::IsMember({6.0, 20.0}));
  con->add_option("--points", contour_args.cone_points, "SI-SDR cone points")
      ->check(CLI::Range(2, 1000));
  con->add_option("--out", contour_args.out, "Output CSV (stdout when omitted)");

  auto* tr = app.add_subcommand("train", "Train one toy separator");
  AddOverrideFlags(tr, train_o, false);
  tr->add_option("--out", train_out, "Output directory")->required();
  tr->add_option("--metric", train_o.metric, "snr or sisdr");
  tr->add_option("--a2t", train_o.a2t, "on or off");
  tr->add_option("--alpha", train_o.alphas, "Balancing alpha")->expected(1);
  bool write_estimates = false;
  tr->add_flag("--write-estimates", write_estimates,
               "Also write evaluation-set outputs and references as WAVs");

  auto* sw = app.add_subcommand("sweep", "Objective x alpha sweep of toy separators");
  AddOverrideFlags(sw, sweep_o, true);
  sw->add_option("--out", sweep_out, "Output directory")->required();
  sw->add_option("--metric", sweep_o.metric, "Restrict to snr or sisdr");
  sw->add_option("--alpha", sweep_o.alphas, "Alpha grid, comma separated")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*sim) return RunSimulate(sim_o, sim_out);
    if (*met) return RunMetrics(metrics_args);
    if (*con) return RunContour(contour_args);
    if (*tr) return RunTrain(train_o, train_out, write_estimates);
    if (*sw) return RunSweepCommand(sweep_o, sweep_out);
  } catch (const Error& e) {
    std::cerr << "a2t: " << e.what() << "\n";
    return e.is_numerical() ? kExitNumerical : kExitValidation;
  }
  return kExitValidation;
}

}  // namespace
}  // namespace a2t

int main(int argc, char** argv) { return a2t::Main(argc, argv); }
