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


#include "a2t/losses.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "a2t/error.h"
#include "a2t/metrics.h"

namespace a2t {
namespace {

constexpr double kDbPerNeper = 10.0 / std::numbers::ln10;

double MetricDb(std::span<const double> estimate, std::span<const double> target,
                BaseMetric metric, double alpha) {
  return metric == BaseMetric::kSnr ? AlphaSnrDb(estimate, target, alpha)
                                    : AlphaSiSdrDb(estimate, target, alpha);
}

void CheckSources(std::span<const Waveform> estimates,
                  std::span<const Waveform> targets, const char* what) {
  if (estimates.size() != targets.size()) {
    throw Error(ErrorCode::kArity,
                std::string(what) + ": " + std::to_string(estimates.size()) +
                    " estimates for " + std::to_string(targets.size()) + " targets");
  }
  if (estimates.empty()) {
    throw Error(ErrorCode::kArity, std::string(what) + ": no sources");
  }
  if (estimates.size() > static_cast<std::size_t>(kMaxPitSources)) {
    throw Error(ErrorCode::kComplexity,
                std::string(what) + ": " + std::to_string(estimates.size()) +
                    " sources exceed the exhaustive PIT limit of " +
                    std::to_string(kMaxPitSources));
  }
  const std::size_t n = estimates.front().size();
  for (std::size_t j = 0; j < estimates.size(); ++j) {
    if (estimates[j].size() != n || targets[j].size() != n) {
      throw Error(ErrorCode::kDimension,
                  std::string(what) + ": all signals must share one length");
    }
  }
}

std::vector<std::vector<double>> CostMatrix(std::span<const Waveform> estimates,
                                            std::span<const Waveform> targets,
                                            BaseMetric metric, bool pit) {
  const std::size_t c = estimates.size();
  std::vector<std::vector<double>> cost(c, std::vector<double>(c, 0.0));
  for (std::size_t j = 0; j < c; ++j) {
    for (std::size_t k = 0; k < c; ++k) {
      // Without PIT only the diagonal is ever read.
      if (pit || j == k) {
        cost[j][k] = PairLoss(estimates[j].view(), targets[k].view(), metric, 0.0);
      }
    }
  }
  return cost;
}

}  // namespace

std::string_view BaseMetricName(BaseMetric metric) {
  return metric == BaseMetric::kSnr ? "SNR" : "SI-SDR";
}

double PairLoss(std::span<const double> estimate, std::span<const double> target,
                BaseMetric metric, double alpha) {
  const double db = MetricDb(estimate, target, metric, alpha);
  return -std::clamp(db, -kMetricClampDb, kMetricClampDb);
}

double PairLossGradient(std::span<const double> estimate,
                        std::span<const double> target, BaseMetric metric,
                        double alpha, std::span<double> grad) {
  const double db = MetricDb(estimate, target, metric, alpha);
  if (std::isinf(db)) {
    throw Error(ErrorCode::kGradientUndefined,
                std::string(BaseMetricName(metric)) + " is infinite");
  }
  std::fill(grad.begin(), grad.end(), 0.0);
  if (std::abs(db) > kMetricClampDb) return -std::clamp(db, -kMetricClampDb, kMetricClampDb);

  const std::size_t n = target.size();
  if (metric == BaseMetric::kSnr) {
    // loss = 10 log10(|x - x_hat|^2 + alpha |x|^2) - 10 log10 |x|^2
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = estimate[i] - target[i];
      err += d * d;
    }
    const double denom = err + alpha * Energy(target);
    const double k = 2.0 * kDbPerNeper / denom;
    for (std::size_t i = 0; i < n; ++i) grad[i] = k * (estimate[i] - target[i]);
  } else {
    // loss = -10 log10(q / (1 + alpha - q)), q = b^2 / (a e),
    // dq/dx_hat = (2b / (a e)) (x - (b / e) x_hat).
    const double a = Energy(target);
    const double e = Energy(estimate);
    const double b = Dot(estimate, target);
    const double q = b * b / (a * e);
    const double k = -2.0 * kDbPerNeper * (1.0 + alpha) / (b * ((1.0 + alpha) - q));
    const double ratio = b / e;
    for (std::size_t i = 0; i < n; ++i) {
      grad[i] = k * (target[i] - ratio * estimate[i]);
    }
  }
  return -db;
}

Permutation BestPermutation(const std::vector<std::vector<double>>& cost, bool pit) {
  const int c = static_cast<int>(cost.size());
  Permutation perm(c);
  std::iota(perm.begin(), perm.end(), 0);
  if (!pit) return perm;
  if (c > kMaxPitSources) {
    throw Error(ErrorCode::kComplexity, "too many sources for exhaustive PIT");
  }
  Permutation best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int j = 0; j < c; ++j) total += cost[j][perm[j]];
    // Strict comparison keeps the first (lexicographically smallest) minimum.
    if (total < best_cost) {
      best_cost = total;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

LossBreakdown SeparationLoss(std::span<const Waveform> estimates,
                             std::span<const Waveform> targets,
                             const LossConfig& cfg) {
  CheckSources(estimates, targets, "separation_loss");
  const auto cost = CostMatrix(estimates, targets, cfg.base_metric, cfg.pit);
  LossBreakdown out;
  out.chosen_permutation = BestPermutation(cost, cfg.pit);
  for (std::size_t j = 0; j < cost.size(); ++j) {
    out.separation_term += cost[j][out.chosen_permutation[j]];
  }
  out.total = out.separation_term + out.preservation_term;
  return out;
}

LossBreakdown A2tLoss(std::span<const Waveform> estimates,
                      std::span<const Waveform> targets,
                      std::span<const Waveform> mapped_directs,
                      std::span<const Waveform> directs, const LossConfig& cfg) {
  LossBreakdown out = SeparationLoss(estimates, targets, cfg);
  if (!cfg.use_a2t) return out;
  if (mapped_directs.size() != estimates.size() || directs.size() != estimates.size()) {
    throw Error(ErrorCode::kArity, "a2t_loss: preservation lists must have " +
                                       std::to_string(estimates.size()) + " entries");
  }
  for (std::size_t j = 0; j < estimates.size(); ++j) {
    const Waveform& direct = directs[out.chosen_permutation[j]];
    out.preservation_term +=
        PairLoss(mapped_directs[j].view(), direct.view(), cfg.base_metric, cfg.alpha);
  }
  out.total = out.separation_term + out.preservation_term;
  return out;
}

LossGradient ComputeLossGradient(const LossInputs& inputs, const LossConfig& cfg) {
  LossGradient out;
  out.breakdown = cfg.use_a2t ? A2tLoss(inputs.estimates, inputs.targets,
                                        inputs.mapped_directs, inputs.directs, cfg)
                              : SeparationLoss(inputs.estimates, inputs.targets, cfg);
  const Permutation& perm = out.breakdown.chosen_permutation;
  const std::size_t c = inputs.estimates.size();
  out.estimates.resize(c);
  for (std::size_t j = 0; j < c; ++j) {
    out.estimates[j].resize(inputs.estimates[j].size());
    PairLossGradient(inputs.estimates[j].view(), inputs.targets[perm[j]].view(),
                     cfg.base_metric, 0.0, out.estimates[j]);
  }
  if (cfg.use_a2t) {
    out.mapped_directs.resize(c);
    for (std::size_t j = 0; j < c; ++j) {
      out.mapped_directs[j].resize(inputs.mapped_directs[j].size());
      PairLossGradient(inputs.mapped_directs[j].view(), inputs.directs[perm[j]].view(),
                       cfg.base_metric, cfg.alpha, out.mapped_directs[j]);
    }
  }
  return out;
}

}  // namespace a2t
