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


#ifndef A2T_LOSSES_H_
#define A2T_LOSSES_H_

#include <span>
#include <string_view>
#include <vector>

#include "a2t/waveform.h"

namespace a2t {

enum class BaseMetric { kSnr, kSiSdr };

std::string_view BaseMetricName(BaseMetric metric);

struct LossConfig {
  BaseMetric base_metric = BaseMetric::kSnr;
  bool use_a2t = false;
  // Balancing parameter of the preservation term only; the separation term
  // always uses alpha = 0. Ignored when use_a2t is false.
  double alpha = 0.0;
  bool pit = true;
};

// permutation[j] is the target index paired with estimate j.
using Permutation = std::vector<int>;

struct LossBreakdown {
  double total = 0.0;
  double separation_term = 0.0;
  double preservation_term = 0.0;
  Permutation chosen_permutation;
};

inline constexpr int kMaxPitSources = 8;

// Negated alpha-balanced metric, with the metric clamped to [-300, 300] dB.
double PairLoss(std::span<const double> estimate, std::span<const double> target,
                BaseMetric metric, double alpha);

// Writes d PairLoss / d estimate into `grad` and returns the loss. A clamped
// pair has zero gradient; an infinite metric is a kGradientUndefined error.
double PairLossGradient(std::span<const double> estimate,
                        std::span<const double> target, BaseMetric metric,
                        double alpha, std::span<double> grad);

// Exhaustive search over all C! assignments of cost[j][k] (estimate j,
// target k). Ties resolve to the lexicographically smallest permutation.
// With pit == false the identity is returned.
Permutation BestPermutation(const std::vector<std::vector<double>>& cost, bool pit);

// sum_j D(estimate_j, target_pi(j)), D the negated base metric at alpha 0.
LossBreakdown SeparationLoss(std::span<const Waveform> estimates,
                             std::span<const Waveform> targets,
                             const LossConfig& cfg);

// Separation term plus sum_j D_alpha(mapped_directs[j], directs[pi(j)]),
// where pi is chosen from the separation term alone. mapped_directs[j] is the
// mapping of output j applied to the direct path it is paired with.
LossBreakdown A2tLoss(std::span<const Waveform> estimates,
                      std::span<const Waveform> targets,
                      std::span<const Waveform> mapped_directs,
                      std::span<const Waveform> directs, const LossConfig& cfg);

struct LossInputs {
  std::span<const Waveform> estimates;
  std::span<const Waveform> targets;
  // Required only when cfg.use_a2t is set.
  std::span<const Waveform> mapped_directs;
  std::span<const Waveform> directs;
};

struct LossGradient {
  LossBreakdown breakdown;
  std::vector<std::vector<double>> estimates;       // d total / d estimates[j]
  std::vector<std::vector<double>> mapped_directs;  // empty without A2T
};

// Analytic gradient of SeparationLoss (use_a2t false) or A2tLoss. The PIT
// permutation is held fixed, which is a subgradient at ties.
LossGradient ComputeLossGradient(const LossInputs& inputs, const LossConfig& cfg);

}  // namespace a2t

#endif  // A2T_LOSSES_H_
