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


#include "a2t/toytrain.h"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "a2t/error.h"
#include "a2t/metrics.h"
#include "test_util.h"

namespace a2t {
namespace {

using testing::RandomWaveform;
using testing::RelativeError;

// A reverberant-looking instance built from random signals: the late part
// is a decaying random filter of the direct path.
MixtureInstance RandomInstance(Rng& rng, std::size_t n, double overlap = 1.0) {
  MixtureInstance m;
  m.mixture = Waveform::Zeros(n, 8000);
  for (int j = 0; j < kNumSpeakers; ++j) {
    m.direct_targets[j] = RandomWaveform(rng, n, 8000);
    Waveform h = Waveform::Zeros(40, 8000);
    for (std::size_t k = 1; k < h.size(); ++k) h[k] = 0.3 * rng.Normal() * std::exp(-0.1 * k);
    m.late_targets[j] = Resized(ConvolveFull(m.direct_targets[j], h), n);
    m.reverberant_targets[j] = Add(m.direct_targets[j], m.late_targets[j]);
    m.mixture = Add(m.mixture, m.reverberant_targets[j]);
  }
  m.noise = Scale(RandomWaveform(rng, n, 8000), 0.1);
  m.mixture = Add(m.mixture, m.noise);
  m.spec.overlap_ratio = overlap;
  m.overlap_bucket = BucketForOverlap(overlap);
  return m;
}

LinearSeparator RandomModel(Rng& rng, int taps) {
  LinearSeparator model(kNumSpeakers, taps);
  for (int j = 0; j < kNumSpeakers; ++j) {
    for (double& w : model.mutable_filter(j)) w = 0.1 * rng.Normal();
  }
  return model;
}

double TotalLoss(const LinearSeparator& model, const MixtureInstance& m, const LossConfig& cfg) {
  return ComputeUtteranceGradient(model, m, cfg).breakdown.total;
}

std::vector<LossConfig> AllLossConfigs() {
  std::vector<LossConfig> out;
  for (BaseMetric metric : {BaseMetric::kSnr, BaseMetric::kSiSdr}) {
    LossConfig plain;
    plain.base_metric = metric;
    out.push_back(plain);
    for (double alpha : {0.0, 0.3, 1.0, 3.0}) {
      LossConfig a2t = plain;
      a2t.use_a2t = true;
      a2t.alpha = alpha;
      out.push_back(a2t);
    }
  }
  return out;
}

TEST(LinearSeparatorTest, CenteredImpulseIsIdentity) {
  Rng rng(1);
  LinearSeparator model(kNumSpeakers, 64);
  for (int j = 0; j < kNumSpeakers; ++j) model.mutable_filter(j)[model.center()] = 1.0;
  const Waveform x = RandomWaveform(rng, 300);
  for (const Waveform& y : model.Forward(x)) EXPECT_EQ(y, x);
}

TEST(LinearSeparatorTest, ForwardIsLinear) {
  Rng rng(2);
  const LinearSeparator model = RandomModel(rng, 64);
  const Waveform a = RandomWaveform(rng, 500);
  const Waveform b = RandomWaveform(rng, 500);
  const auto ya = model.Forward(a);
  const auto yb = model.Forward(b);
  const auto yab = model.Forward(Add(a, b));
  for (int j = 0; j < kNumSpeakers; ++j) {
    ASSERT_EQ(yab[j].size(), a.size());
    const Waveform diff = Subtract(yab[j], Add(ya[j], yb[j]));
    EXPECT_LE(std::sqrt(Energy(diff)), 1e-12 * std::sqrt(Energy(yab[j])));
  }
}

TEST(LinearSeparatorTest, MatchesNaiveSameConvolution) {
  Rng rng(3);
  for (int taps : {1, 4, 5, 64}) {
    const LinearSeparator model = RandomModel(rng, taps);
    const Waveform x = RandomWaveform(rng, 200);
    const Waveform y = model.ForwardSource(1, x);
    const std::vector<double> full = testing::NaiveConvolve(x.samples, model.filter(1));
    for (std::size_t n = 0; n < x.size(); ++n) {
      EXPECT_NEAR(y[n], full[n + model.center()], 1e-12);
    }
  }
}

TEST(LinearSeparatorTest, ZeroFiltersGiveZeroOutputs) {
  Rng rng(4);
  const LinearSeparator model(kNumSpeakers, 8);
  for (const Waveform& y : model.Forward(RandomWaveform(rng, 20))) {
    EXPECT_EQ(Energy(y), 0.0);
  }
}

TEST(LinearSeparatorTest, ShortInputIsLengthError) {
  const LinearSeparator model(kNumSpeakers, 64);
  try {
    model.Forward(Waveform::Zeros(63, 8000));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLength);
  }
}

TEST(LinearSeparatorTest, JsonRoundTrip) {
  Rng rng(5);
  const LinearSeparator model = RandomModel(rng, 16);
  EXPECT_EQ(LinearSeparator::FromJson(model.ToJson()), model);
  EXPECT_THROW(LinearSeparator::FromJson(nlohmann::json::array()), Error);
  EXPECT_THROW(LinearSeparator::FromJson(nlohmann::json{{1.0, 2.0}, {1.0}}), Error);
}

TEST(InitTest, RangesAndDeterminism) {
  const LinearSeparator a = InitSeparator(2, 64, InitKind::kSmallRandom, 9);
  EXPECT_EQ(a, InitSeparator(2, 64, InitKind::kSmallRandom, 9));
  for (int j = 0; j < 2; ++j) {
    for (double w : a.filter(j)) EXPECT_LE(std::abs(w), 0.01);
  }
  const LinearSeparator b = InitSeparator(2, 64, InitKind::kIdentityPlusNoise, 9);
  EXPECT_NEAR(b.filter(0)[32], 1.0, 0.01);
}

TEST(TapGradientTest, MatchesFiniteDifferencesOnLength256) {
  Rng rng(6);
  const MixtureInstance m = RandomInstance(rng, 256);
  for (const LossConfig& cfg : AllLossConfigs()) {
    const LinearSeparator model = RandomModel(rng, 64);
    const UtteranceGradient g = ComputeUtteranceGradient(model, m, cfg);
    for (int j = 0; j < kNumSpeakers; ++j) {
      for (int k = 0; k < 64; k += 7) {
        const auto f = [&](const std::vector<double>& w) {
          LinearSeparator perturbed = model;
          perturbed.mutable_filter(j) = w;
          return TotalLoss(perturbed, m, cfg);
        };
        const double fd = testing::CentralDifference(f, model.filter(j), k, 1e-6);
        EXPECT_LT(RelativeError(fd, g.taps[j][k]), 1e-5)
            << BaseMetricName(cfg.base_metric) << " a2t=" << cfg.use_a2t
            << " alpha=" << cfg.alpha << " j=" << j << " k=" << k;
      }
    }
  }
}

TEST(StatisticsTest, GramMatchesDirectInnerProducts) {
  Rng rng(7);
  const MixtureInstance m = RandomInstance(rng, 300);
  const int taps = 9;
  const UtteranceStatistics st = ComputeUtteranceStatistics(m, taps);
  // Column k of the convolution matrix is the input shifted by center - k.
  LinearSeparator unit(kNumSpeakers, taps);
  std::vector<Waveform> columns;
  for (int k = 0; k < taps; ++k) {
    unit.mutable_filter(0).assign(taps, 0.0);
    unit.mutable_filter(0)[k] = 1.0;
    columns.push_back(unit.ForwardSource(0, m.mixture));
  }
  for (int k = 0; k < taps; ++k) {
    for (int l = 0; l < taps; ++l) {
      EXPECT_NEAR(st.mix_gram[k * taps + l], Dot(columns[k], columns[l]), 1e-9);
    }
    EXPECT_NEAR(st.mix_cross[1][k], Dot(columns[k], m.reverberant_targets[1]), 1e-9);
  }
}

TEST(StatisticsTest, EnginesAgree) {
  Rng rng(8);
  const MixtureInstance m = RandomInstance(rng, 400);
  const UtteranceStatistics st = ComputeUtteranceStatistics(m, 32);
  for (const LossConfig& cfg : AllLossConfigs()) {
    const LinearSeparator model = RandomModel(rng, 32);
    const UtteranceGradient a = ComputeUtteranceGradient(model, m, cfg);
    const UtteranceGradient b = ComputeUtteranceGradient(model, st, cfg);
    EXPECT_EQ(a.breakdown.chosen_permutation, b.breakdown.chosen_permutation);
    EXPECT_LT(RelativeError(a.breakdown.total, b.breakdown.total), 1e-9);
    EXPECT_LT(RelativeError(a.breakdown.preservation_term + 1.0,
                            b.breakdown.preservation_term + 1.0),
              1e-9);
    for (int j = 0; j < kNumSpeakers; ++j) {
      for (int k = 0; k < 32; ++k) {
        EXPECT_NEAR(a.taps[j][k], b.taps[j][k], 1e-8 * (1.0 + std::abs(a.taps[j][k])));
      }
    }
  }
}

TEST(StatisticsTest, MismatchedFilterLengthIsRejected) {
  Rng rng(9);
  const MixtureInstance m = RandomInstance(rng, 100);
  const UtteranceStatistics st = ComputeUtteranceStatistics(m, 8);
  EXPECT_THROW(ComputeUtteranceGradient(RandomModel(rng, 16), st, LossConfig{}), Error);
}

class TrainTest : public ::testing::Test {
 protected:
  void SetUp() override {
    Rng rng(10);
    for (int i = 0; i < 12; ++i) data_.push_back(RandomInstance(rng, 512, i / 12.0));
  }
  std::vector<MixtureInstance> data_;
};

TEST_F(TrainTest, IsDeterministic) {
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.loss.use_a2t = true;
  cfg.loss.alpha = 0.3;
  cfg.filter_length = 16;
  LinearSeparator a = InitSeparator(2, 16, cfg.init, 1);
  LinearSeparator b = a;
  Train(a, data_, cfg);
  Train(b, data_, cfg);
  EXPECT_EQ(a, b);
}

TEST_F(TrainTest, ClippedGradientNormRespectsLimit) {
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.grad_clip_l2 = 0.5;
  cfg.filter_length = 16;
  LinearSeparator model = InitSeparator(2, 16, cfg.init, 2);
  const TrainReport r = Train(model, data_, cfg);
  ASSERT_EQ(r.trace.size(), 5u);
  for (const EpochStats& s : r.trace) EXPECT_LE(s.max_clipped_grad_norm, 0.5 + 1e-9);
}

TEST_F(TrainTest, PreservationNeverBeatsItsBound) {
  for (double alpha : {0.1, 1.0}) {
    TrainConfig cfg;
    cfg.epochs = 20;
    cfg.learning_rate = 0.01;
    cfg.loss.use_a2t = true;
    cfg.loss.alpha = alpha;
    cfg.filter_length = 16;
    cfg.init = InitKind::kIdentityPlusNoise;
    LinearSeparator model = InitSeparator(2, 16, cfg.init, 3);
    const TrainReport r = Train(model, data_, cfg);
    const double bound = -kNumSpeakers * 10.0 * std::log10(1.0 / alpha);
    for (const EpochStats& s : r.trace) EXPECT_GE(s.min_preservation, bound - 1e-9);
  }
}

TEST_F(TrainTest, LinearityHoldsAfterTraining) {
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.filter_length = 16;
  LinearSeparator model = InitSeparator(2, 16, cfg.init, 4);
  Train(model, data_, cfg);
  Rng rng(11);
  const Waveform a = RandomWaveform(rng, 100);
  const Waveform b = RandomWaveform(rng, 100);
  const Waveform lhs = model.ForwardSource(0, Add(a, b));
  const Waveform rhs = Add(model.ForwardSource(0, a), model.ForwardSource(0, b));
  EXPECT_LE(std::sqrt(Energy(Subtract(lhs, rhs))), 1e-12 * std::sqrt(Energy(lhs)));
}

TEST_F(TrainTest, ZeroModelWithSiSdrDivergesAtEpochZero) {
  TrainConfig cfg;
  cfg.loss.base_metric = BaseMetric::kSiSdr;
  cfg.filter_length = 16;
  LinearSeparator model(2, 16);
  try {
    Train(model, data_, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDivergence);
    EXPECT_NE(std::string(e.what()).find("epoch 0"), std::string::npos);
  }
}

TEST_F(TrainTest, ConfigValidation) {
  LinearSeparator model(2, 16);
  TrainConfig cfg;
  cfg.grad_clip_l2 = 0.0;
  EXPECT_THROW(Train(model, data_, cfg), Error);
  cfg = TrainConfig{};
  EXPECT_THROW(Train(model, std::span<const MixtureInstance>(), cfg), Error);
}

TEST(OverfitTest, SingleUtteranceReachesTwentyDb) {
  // Two spectrally disjoint sources; a 64-tap filter can separate them.
  const std::size_t n = 2048;
  MixtureInstance m;
  m.mixture = Waveform::Zeros(n, 8000);
  const double freqs[2][3] = {{180.0, 310.0, 420.0}, {2300.0, 2750.0, 3100.0}};
  for (int j = 0; j < kNumSpeakers; ++j) {
    Waveform s = Waveform::Zeros(n, 8000);
    for (std::size_t t = 0; t < n; ++t) {
      for (double f : freqs[j]) s[t] += std::sin(2.0 * M_PI * f * t / 8000.0 + j + f);
    }
    m.direct_targets[j] = s;
    m.late_targets[j] = Waveform::Zeros(n, 8000);
    m.reverberant_targets[j] = s;
    m.mixture = Add(m.mixture, s);
  }
  TrainConfig cfg;
  cfg.epochs = 3000;
  cfg.learning_rate = 0.002;
  cfg.batch_size = 1;
  LinearSeparator model = InitSeparator(2, 64, cfg.init, 5);
  const std::vector<MixtureInstance> data = {m};
  const TrainReport r = Train(model, data, cfg);
  EXPECT_GT(r.table.overall.snr, 20.0) << r.trace.back().loss;
}

TEST(EvaluateTest, IdentityModelOnAnechoicInstances) {
  Rng rng(12);
  std::vector<MixtureInstance> data;
  for (int i = 0; i < 4; ++i) {
    MixtureInstance m = RandomInstance(rng, 256, 0.3);
    for (int j = 0; j < kNumSpeakers; ++j) {
      m.late_targets[j] = Waveform::Zeros(256, 8000);
      m.reverberant_targets[j] = m.direct_targets[j];
    }
    m.mixture = Add(Add(m.reverberant_targets[0], m.reverberant_targets[1]), m.noise);
    data.push_back(m);
  }
  const LinearSeparator model = InitSeparator(2, 16, InitKind::kIdentityPlusNoise, 0);
  LinearSeparator identity(2, 16);
  for (int j = 0; j < 2; ++j) identity.mutable_filter(j)[identity.center()] = 1.0;
  const EvaluationTable t = Evaluate(identity, data);
  for (std::size_t u = 0; u < data.size(); ++u) {
    const UtteranceMetrics& row = t.utterances[u];
    EXPECT_EQ(row.values.tsnr, kMetricClampDb);
    const double expected = (Snr(data[u].mixture, data[u].reverberant_targets[0]).db() +
                             Snr(data[u].mixture, data[u].reverberant_targets[1]).db()) /
                            2.0;
    EXPECT_NEAR(row.values.snr, expected, 1e-12);
  }
}

TEST(EvaluateTest, ZeroModelGivesSilenceSentinels) {
  Rng rng(13);
  const std::vector<MixtureInstance> data = {RandomInstance(rng, 128)};
  const EvaluationTable t = Evaluate(LinearSeparator(2, 8), data);
  EXPECT_EQ(t.overall.si_sdr, -kMetricClampDb);
  EXPECT_EQ(t.overall.tsi_sdr, -kMetricClampDb);
  // The SNR of silence against any target is exactly 0 dB.
  EXPECT_EQ(t.overall.snr, 0.0);
  EXPECT_EQ(t.overall.tsnr, 0.0);
}

TEST(EvaluateTest, BucketMeansMatchGroupByOracle) {
  Rng rng(14);
  std::vector<MixtureInstance> data;
  for (int i = 0; i < 20; ++i) data.push_back(RandomInstance(rng, 128, rng.Uniform()));
  const EvaluationTable t = Evaluate(RandomModel(rng, 8), data);
  std::map<int, std::vector<double>> groups;
  for (const UtteranceMetrics& u : t.utterances) {
    groups[static_cast<int>(u.bucket)].push_back(u.values.tsnr);
  }
  for (int b = 0; b < kNumOverlapBuckets; ++b) {
    const auto& g = groups[b];
    EXPECT_EQ(t.buckets[b].count, static_cast<int>(g.size()));
    if (g.empty()) continue;
    double sum = 0.0;
    for (double v : g) sum += v;
    EXPECT_EQ(t.buckets[b].tsnr, sum / g.size());
  }
  EXPECT_EQ(t.overall.count, 20);
}

TEST(EvaluateTest, AlignmentUndoesOutputSwap) {
  Rng rng(15);
  const std::vector<MixtureInstance> data = {RandomInstance(rng, 256)};
  LinearSeparator model = RandomModel(rng, 8);
  LinearSeparator swapped = model;
  swapped.mutable_filter(0) = model.filter(1);
  swapped.mutable_filter(1) = model.filter(0);
  const EvaluationTable a = Evaluate(model, data);
  const EvaluationTable b = Evaluate(swapped, data);
  EXPECT_NEAR(a.overall.snr, b.overall.snr, 1e-12);
  EXPECT_NEAR(a.overall.tsnr, b.overall.tsnr, 1e-12);
  EXPECT_NE(a.utterances[0].permutation, b.utterances[0].permutation);
}

}  // namespace
}  // namespace a2t
