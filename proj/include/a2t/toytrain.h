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


#ifndef A2T_TOYTRAIN_H_
#define A2T_TOYTRAIN_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "a2t/losses.h"
#include "a2t/mixsim.h"
#include "a2t/waveform.h"
#include "json.hpp"

namespace a2t {

inline constexpr int kDefaultFilterLength = 64;

// One FIR filter per output source, applied with centered "same"
// convolution. The mapping is linear in its input by construction, which is
// what makes T(x_d) an exact preservation input for A2T.
class LinearSeparator {
 public:
  LinearSeparator(int num_sources, int filter_length);

  int num_sources() const { return static_cast<int>(filters_.size()); }
  int filter_length() const { return filter_length_; }
  // Tap index aligned with output sample n when reading input sample n.
  int center() const { return filter_length_ / 2; }

  const std::vector<double>& filter(int j) const { return filters_[j]; }
  std::vector<double>& mutable_filter(int j) { return filters_[j]; }

  // out[n] = sum_k taps[k] * input[n + center - k], same length as input.
  Waveform ForwardSource(int j, const Waveform& input) const;
  std::vector<Waveform> Forward(const Waveform& input) const;

  // grad[k] += sum_n output_grad[n] * input[n + center - k].
  void AccumulateTapGradient(int j, const Waveform& input,
                             std::span<const double> output_grad,
                             std::span<double> grad) const;

  nlohmann::json ToJson() const;
  static LinearSeparator FromJson(const nlohmann::json& j);

  bool operator==(const LinearSeparator&) const = default;

 private:
  int filter_length_;
  std::vector<std::vector<double>> filters_;
};

enum class InitKind { kSmallRandom, kIdentityPlusNoise };

// kSmallRandom: taps ~ U(-0.01, 0.01). kIdentityPlusNoise: a centered unit
// impulse plus the same noise.
LinearSeparator InitSeparator(int num_sources, int filter_length, InitKind init,
                              std::uint64_t seed);

// How per-step losses and tap gradients are computed. Both are exact; the
// second-order engine precomputes, per utterance, the Gram matrices and
// cross-correlation vectors of the filter inputs, so a step costs O(L^2)
// instead of O(N L). The time-domain engine is the reference.
enum class GradientEngine { kTimeDomain, kSecondOrder };

struct TrainConfig {
  LossConfig loss;
  GradientEngine engine = GradientEngine::kSecondOrder;
  double learning_rate = 1e-3;
  int epochs = 200;
  double grad_clip_l2 = 5.0;
  int batch_size = 8;
  InitKind init = InitKind::kSmallRandom;
  int filter_length = kDefaultFilterLength;
  std::uint64_t seed = 0;  // initialization and batch order
};

struct EpochStats {
  int epoch = 0;
  double loss = 0.0;          // mean per-utterance total loss
  double separation = 0.0;    // mean per-utterance separation term
  double preservation = 0.0;  // mean per-utterance preservation term
  double min_preservation = 0.0;  // smallest per-utterance preservation term
  double max_clipped_grad_norm = 0.0;
};

// Mean clamped metrics; TSNR/TSI-SDR are measured on the mapped direct path.
struct MetricMeans {
  int count = 0;
  double snr = 0.0;
  double tsnr = 0.0;
  double si_sdr = 0.0;
  double tsi_sdr = 0.0;
};

struct UtteranceMetrics {
  std::size_t index = 0;
  OverlapBucket bucket = OverlapBucket::k75To100;
  MetricMeans values;  // averaged over the sources of one utterance
  Permutation permutation;  // output j is scored against target permutation[j]
};

struct EvaluationTable {
  std::vector<UtteranceMetrics> utterances;
  std::array<MetricMeans, kNumOverlapBuckets> buckets;
  MetricMeans overall;
};

struct TrainReport {
  std::vector<EpochStats> trace;
  EvaluationTable table;  // on the training data after the last epoch
};

struct UtteranceGradient {
  LossBreakdown breakdown;
  std::vector<std::vector<double>> taps;  // d loss / d filter taps
};

// Loss of one utterance under `cfg` and its gradient with respect to every
// filter tap. With A2T, output j is also applied to the direct path of the
// target it is PIT-paired with.
UtteranceGradient ComputeUtteranceGradient(const LinearSeparator& model,
                                           const MixtureInstance& utterance,
                                           const LossConfig& cfg);

// Inner products of every filter input with itself and with the signals the
// outputs are compared against, under the zero-padded "same" convolution:
//   gram[k][l]  = sum_n in[n + c - k] * in[n + c - l]
//   cross[l]    = sum_n ref[n] * in[n + c - l]
// For an output o = T(in): |o|^2 = w' G w and <o, ref> = w' cross.
struct UtteranceStatistics {
  int filter_length = 0;
  std::vector<double> mix_gram;  // row-major L x L
  std::array<std::vector<double>, kNumSpeakers> mix_cross;  // vs reverberant targets
  std::array<double, kNumSpeakers> target_energy{};
  std::array<std::vector<double>, kNumSpeakers> direct_gram;
  std::array<std::vector<double>, kNumSpeakers> direct_cross;  // vs the direct itself
  std::array<double, kNumSpeakers> direct_energy{};
};

UtteranceStatistics ComputeUtteranceStatistics(const MixtureInstance& utterance,
                                               int filter_length);

// Same contract as ComputeUtteranceGradient, evaluated from statistics.
UtteranceGradient ComputeUtteranceGradient(const LinearSeparator& model,
                                           const UtteranceStatistics& stats,
                                           const LossConfig& cfg);

// Plain mini-batch gradient descent with global L2 clipping. Throws a
// kDivergence error naming the epoch on a non-finite loss or gradient.
TrainReport Train(LinearSeparator& model, std::span<const MixtureInstance> dataset,
                  const TrainConfig& cfg);

// PIT-aligned (by `alignment`) separation metrics against the reverberant
// targets and T(x_d) metrics against the direct paths, grouped by overlap
// bucket. A silent output counts as -infinity SI-SDR.
EvaluationTable Evaluate(const LinearSeparator& model,
                         std::span<const MixtureInstance> dataset,
                         BaseMetric alignment = BaseMetric::kSnr);

nlohmann::json TrainReportTraceJson(const TrainReport& report);

}  // namespace a2t

#endif  // A2T_TOYTRAIN_H_
