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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "a2t/error.h"
#include "a2t/metrics.h"
#include "a2t/rng.h"

namespace a2t {
namespace {

// Output-index range [lo, hi) for which input index n + offset is valid.
std::pair<std::ptrdiff_t, std::ptrdiff_t> ValidRange(std::ptrdiff_t offset,
                                                     std::ptrdiff_t n) {
  return {std::max<std::ptrdiff_t>(0, -offset),
          std::min<std::ptrdiff_t>(n, n - offset)};
}

constexpr double kDbPerNeper = 10.0 / std::numbers::ln10;

double At(const std::vector<double>& v, std::ptrdiff_t i) {
  return i >= 0 && i < static_cast<std::ptrdiff_t>(v.size()) ? v[i] : 0.0;
}

// Gram matrix of the zero-padded same-mode convolution input. The first row
// is summed directly; the rest follow from the shift recurrence
// G[k+1][l+1] = G[k][l] + in[c-k-1] in[c-l-1] - in[N-1+c-k] in[N-1+c-l].
std::vector<double> Gram(const std::vector<double>& in, int taps, int center) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(in.size());
  std::vector<double> g(static_cast<std::size_t>(taps) * taps, 0.0);
  for (int l = 0; l < taps; ++l) {
    double sum = 0.0;
    for (std::ptrdiff_t i = 0; i < n; ++i) sum += At(in, i + center) * At(in, i + center - l);
    g[l] = sum;
    g[static_cast<std::size_t>(l) * taps] = sum;
  }
  for (int k = 0; k + 1 < taps; ++k) {
    for (int l = k; l + 1 < taps; ++l) {
      const double v = g[static_cast<std::size_t>(k) * taps + l] +
                       At(in, center - k - 1) * At(in, center - l - 1) -
                       At(in, n - 1 + center - k) * At(in, n - 1 + center - l);
      g[static_cast<std::size_t>(k + 1) * taps + (l + 1)] = v;
      g[static_cast<std::size_t>(l + 1) * taps + (k + 1)] = v;
    }
  }
  return g;
}

std::vector<double> Cross(const std::vector<double>& in, const std::vector<double>& ref,
                          int taps, int center) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(in.size());
  std::vector<double> r(taps, 0.0);
  for (int l = 0; l < taps; ++l) {
    const std::ptrdiff_t offset = center - l;
    const auto [lo, hi] = ValidRange(offset, n);
    double sum = 0.0;
    for (std::ptrdiff_t i = lo; i < hi; ++i) sum += ref[i] * in[i + offset];
    r[l] = sum;
  }
  return r;
}

std::vector<double> MatVec(const std::vector<double>& m, const std::vector<double>& w) {
  const std::size_t taps = w.size();
  std::vector<double> out(taps, 0.0);
  for (std::size_t k = 0; k < taps; ++k) {
    const double* row = m.data() + k * taps;
    double sum = 0.0;
    for (std::size_t l = 0; l < taps; ++l) sum += row[l] * w[l];
    out[k] = sum;
  }
  return out;
}

double DotVec(const std::vector<double>& a, const std::vector<double>& b) {
  return Dot(std::span<const double>(a), std::span<const double>(b));
}

// Loss of one (output, reference) pair expressed through a = |ref|^2,
// b = <out, ref>, e = |out|^2 and err = |out - ref|^2, with matching
// derivatives. Mirrors PairLoss/PairLossGradient including clamping.
struct ScalarPairLoss {
  double loss = 0.0;
  double d_cross = 0.0;   // dL/db
  double d_energy = 0.0;  // dL/de
  double d_err = 0.0;     // dL/derr
};

ScalarPairLoss PairLossFromStatistics(double a, double b, double e, double err,
                                      BaseMetric metric, double alpha, bool need_grad) {
  if (a == 0.0) throw Error(ErrorCode::kDegenerate, "zero-energy reference");
  ScalarPairLoss out;
  double db = 0.0;
  double q = 0.0;
  if (metric == BaseMetric::kSnr) {
    const double denom = err + alpha * a;
    db = denom == 0.0 ? std::numeric_limits<double>::infinity() : 10.0 * std::log10(a / denom);
  } else {
    if (e == 0.0) throw Error(ErrorCode::kDegenerate, "si-sdr: zero-energy estimate");
    q = b * b / (a * e);
    const double denom = (1.0 + alpha) - q;
    if (q == 0.0) {
      db = -std::numeric_limits<double>::infinity();
    } else if (denom <= 0.0) {
      db = std::numeric_limits<double>::infinity();
    } else {
      db = 10.0 * std::log10(q / denom);
    }
  }
  out.loss = -std::clamp(db, -kMetricClampDb, kMetricClampDb);
  if (!need_grad) return out;
  if (std::isinf(db)) {
    throw Error(ErrorCode::kGradientUndefined, std::string(BaseMetricName(metric)) + " is infinite");
  }
  if (std::abs(db) > kMetricClampDb) return out;
  if (metric == BaseMetric::kSnr) {
    out.d_err = kDbPerNeper / (err + alpha * a);
  } else {
    const double d_q = -kDbPerNeper * (1.0 + alpha) / (q * ((1.0 + alpha) - q));
    out.d_cross = d_q * 2.0 * b / (a * e);
    out.d_energy = -d_q * b * b / (a * e * e);
  }
  return out;
}

double SafeSiSdrDb(const Waveform& estimate, const Waveform& target) {
  if (Energy(estimate) == 0.0) return -kMetricClampDb;
  return SiSdr(estimate, target).clamped_db();
}

double AlignmentCost(const Waveform& estimate, const Waveform& target,
                     BaseMetric metric) {
  if (metric == BaseMetric::kSnr) return -Snr(estimate, target).clamped_db();
  return -SafeSiSdrDb(estimate, target);
}

void Accumulate(MetricMeans& into, const MetricMeans& v) {
  into.count += 1;
  into.snr += v.snr;
  into.tsnr += v.tsnr;
  into.si_sdr += v.si_sdr;
  into.tsi_sdr += v.tsi_sdr;
}

void Finish(MetricMeans& m) {
  if (m.count == 0) return;
  m.snr /= m.count;
  m.tsnr /= m.count;
  m.si_sdr /= m.count;
  m.tsi_sdr /= m.count;
}

void ValidateConfig(const TrainConfig& cfg) {
  if (!(cfg.grad_clip_l2 > 0.0)) {
    throw Error(ErrorCode::kValidation, "grad_clip_l2 must be positive");
  }
  if (!(cfg.learning_rate > 0.0)) {
    throw Error(ErrorCode::kValidation, "learning_rate must be positive");
  }
  if (cfg.batch_size < 1 || cfg.epochs < 0 || cfg.filter_length < 1) {
    throw Error(ErrorCode::kValidation, "batch_size, epochs or filter_length invalid");
  }
  if (cfg.loss.use_a2t && !(cfg.loss.alpha >= 0.0)) {
    throw Error(ErrorCode::kValidation, "alpha must be non-negative");
  }
}

}  // namespace

LinearSeparator::LinearSeparator(int num_sources, int filter_length)
    : filter_length_(filter_length),
      filters_(num_sources, std::vector<double>(filter_length, 0.0)) {
  if (num_sources < 1 || filter_length < 1) {
    throw Error(ErrorCode::kValidation, "separator needs >= 1 source and tap");
  }
}

Waveform LinearSeparator::ForwardSource(int j, const Waveform& input) const {
  if (input.size() < static_cast<std::size_t>(filter_length_)) {
    throw Error(ErrorCode::kLength,
                "input of " + std::to_string(input.size()) +
                    " samples is shorter than the " + std::to_string(filter_length_) +
                    "-tap filter");
  }
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(input.size());
  Waveform out = Waveform::Zeros(input.size(), input.sample_rate);
  const std::vector<double>& taps = filters_[j];
  const double* in = input.samples.data();
  double* dst = out.samples.data();
  for (int k = 0; k < filter_length_; ++k) {
    const double w = taps[k];
    if (w == 0.0) continue;
    const std::ptrdiff_t offset = center() - k;
    const auto [lo, hi] = ValidRange(offset, n);
    for (std::ptrdiff_t i = lo; i < hi; ++i) dst[i] += w * in[i + offset];
  }
  return out;
}

std::vector<Waveform> LinearSeparator::Forward(const Waveform& input) const {
  std::vector<Waveform> out;
  out.reserve(filters_.size());
  for (int j = 0; j < num_sources(); ++j) out.push_back(ForwardSource(j, input));
  return out;
}

void LinearSeparator::AccumulateTapGradient(int /*j*/, const Waveform& input,
                                            std::span<const double> output_grad,
                                            std::span<double> grad) const {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(input.size());
  const double* in = input.samples.data();
  for (int k = 0; k < filter_length_; ++k) {
    const std::ptrdiff_t offset = center() - k;
    const auto [lo, hi] = ValidRange(offset, n);
    double sum = 0.0;
    for (std::ptrdiff_t i = lo; i < hi; ++i) sum += output_grad[i] * in[i + offset];
    grad[k] += sum;
  }
}

nlohmann::json LinearSeparator::ToJson() const { return filters_; }

LinearSeparator LinearSeparator::FromJson(const nlohmann::json& j) {
  try {
    const auto filters = j.get<std::vector<std::vector<double>>>();
    if (filters.empty() || filters.front().empty()) {
      throw Error(ErrorCode::kValidation, "model json has no filters");
    }
    LinearSeparator model(static_cast<int>(filters.size()),
                          static_cast<int>(filters.front().size()));
    for (std::size_t s = 0; s < filters.size(); ++s) {
      if (filters[s].size() != filters.front().size()) {
        throw Error(ErrorCode::kValidation, "model filters differ in length");
      }
      model.filters_[s] = filters[s];
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kValidation, std::string("model json: ") + e.what());
  }
}

LinearSeparator InitSeparator(int num_sources, int filter_length, InitKind init,
                              std::uint64_t seed) {
  LinearSeparator model(num_sources, filter_length);
  Rng rng(seed);
  for (int j = 0; j < num_sources; ++j) {
    for (double& w : model.mutable_filter(j)) w = rng.Uniform(-0.01, 0.01);
    if (init == InitKind::kIdentityPlusNoise) model.mutable_filter(j)[model.center()] += 1.0;
  }
  return model;
}

UtteranceGradient ComputeUtteranceGradient(const LinearSeparator& model,
                                           const MixtureInstance& utterance,
                                           const LossConfig& cfg) {
  if (model.num_sources() != kNumSpeakers) {
    throw Error(ErrorCode::kArity, "separator must have one filter per speaker");
  }
  const std::vector<Waveform> estimates = model.Forward(utterance.mixture);
  const std::span<const Waveform> targets(utterance.reverberant_targets);
  const std::span<const Waveform> directs(utterance.direct_targets);

  LossInputs inputs{estimates, targets, {}, {}};
  std::vector<Waveform> mapped;
  if (cfg.use_a2t) {
    const Permutation perm = SeparationLoss(estimates, targets, cfg).chosen_permutation;
    for (int j = 0; j < kNumSpeakers; ++j) {
      mapped.push_back(model.ForwardSource(j, directs[perm[j]]));
    }
    inputs.mapped_directs = mapped;
    inputs.directs = directs;
  }
  const LossGradient lg = ComputeLossGradient(inputs, cfg);

  UtteranceGradient out;
  out.breakdown = lg.breakdown;
  out.taps.assign(kNumSpeakers, std::vector<double>(model.filter_length(), 0.0));
  const Permutation& perm = lg.breakdown.chosen_permutation;
  for (int j = 0; j < kNumSpeakers; ++j) {
    model.AccumulateTapGradient(j, utterance.mixture, lg.estimates[j], out.taps[j]);
    if (cfg.use_a2t) {
      model.AccumulateTapGradient(j, directs[perm[j]], lg.mapped_directs[j], out.taps[j]);
    }
  }
  return out;
}

UtteranceStatistics ComputeUtteranceStatistics(const MixtureInstance& utterance,
                                               int filter_length) {
  if (filter_length < 1) throw Error(ErrorCode::kValidation, "filter_length must be >= 1");
  if (utterance.mixture.size() < static_cast<std::size_t>(filter_length)) {
    throw Error(ErrorCode::kLength, "utterance is shorter than the filter");
  }
  const int center = filter_length / 2;
  UtteranceStatistics st;
  st.filter_length = filter_length;
  st.mix_gram = Gram(utterance.mixture.samples, filter_length, center);
  for (int k = 0; k < kNumSpeakers; ++k) {
    CheckSameLength(utterance.mixture, utterance.reverberant_targets[k], "statistics");
    CheckSameLength(utterance.mixture, utterance.direct_targets[k], "statistics");
    const std::vector<double>& target = utterance.reverberant_targets[k].samples;
    const std::vector<double>& direct = utterance.direct_targets[k].samples;
    st.mix_cross[k] = Cross(utterance.mixture.samples, target, filter_length, center);
    st.target_energy[k] = Energy(target);
    st.direct_gram[k] = Gram(direct, filter_length, center);
    st.direct_cross[k] = Cross(direct, direct, filter_length, center);
    st.direct_energy[k] = Energy(direct);
  }
  return st;
}

UtteranceGradient ComputeUtteranceGradient(const LinearSeparator& model,
                                           const UtteranceStatistics& st,
                                           const LossConfig& cfg) {
  if (model.num_sources() != kNumSpeakers) {
    throw Error(ErrorCode::kArity, "separator must have one filter per speaker");
  }
  if (st.filter_length != model.filter_length()) {
    throw Error(ErrorCode::kDimension, "statistics were computed for another filter length");
  }
  const int taps = model.filter_length();
  std::array<std::vector<double>, kNumSpeakers> gw;
  std::array<double, kNumSpeakers> energy{};
  for (int j = 0; j < kNumSpeakers; ++j) {
    gw[j] = MatVec(st.mix_gram, model.filter(j));
    energy[j] = DotVec(model.filter(j), gw[j]);
  }

  // Separation: alpha = 0 pair losses for every assignment, then PIT.
  std::vector<std::vector<double>> cost(kNumSpeakers, std::vector<double>(kNumSpeakers));
  std::vector<std::vector<double>> cross(kNumSpeakers, std::vector<double>(kNumSpeakers));
  for (int j = 0; j < kNumSpeakers; ++j) {
    for (int k = 0; k < kNumSpeakers; ++k) {
      if (!cfg.pit && j != k) continue;
      cross[j][k] = DotVec(model.filter(j), st.mix_cross[k]);
      const double a = st.target_energy[k];
      const double err = std::max(0.0, energy[j] - 2.0 * cross[j][k] + a);
      cost[j][k] = PairLossFromStatistics(a, cross[j][k], energy[j], err, cfg.base_metric,
                                          0.0, false).loss;
    }
  }
  const Permutation perm = BestPermutation(cost, cfg.pit);

  UtteranceGradient out;
  out.taps.assign(kNumSpeakers, std::vector<double>(taps, 0.0));
  out.breakdown.chosen_permutation = perm;
  for (int j = 0; j < kNumSpeakers; ++j) {
    const int k = perm[j];
    const double a = st.target_energy[k];
    const double b = cross[j][k];
    const double err = std::max(0.0, energy[j] - 2.0 * b + a);
    const ScalarPairLoss sep =
        PairLossFromStatistics(a, b, energy[j], err, cfg.base_metric, 0.0, true);
    out.breakdown.separation_term += sep.loss;
    // d err / dw = 2 (G w - r), d e / dw = 2 G w, d b / dw = r.
    std::vector<double>& g = out.taps[j];
    for (int t = 0; t < taps; ++t) {
      g[t] += sep.d_err * 2.0 * (gw[j][t] - st.mix_cross[k][t]) +
              sep.d_energy * 2.0 * gw[j][t] + sep.d_cross * st.mix_cross[k][t];
    }

    if (!cfg.use_a2t) continue;
    // Preservation on T_j(x_d^k). The error is the quadratic form of
    // u = w - centered impulse, which avoids cancelling |o|^2 - 2<o,d> + |d|^2
    // when the mapping is close to identity.
    const std::vector<double>& w = model.filter(j);
    const std::vector<double> dw = MatVec(st.direct_gram[k], w);
    std::vector<double> u = w;
    u[model.center()] -= 1.0;
    const std::vector<double> du = MatVec(st.direct_gram[k], u);
    const double pe = DotVec(w, dw);
    const double pb = DotVec(w, st.direct_cross[k]);
    const double perr = std::max(0.0, DotVec(u, du));
    const ScalarPairLoss pres = PairLossFromStatistics(
        st.direct_energy[k], pb, pe, perr, cfg.base_metric, cfg.alpha, true);
    out.breakdown.preservation_term += pres.loss;
    for (int t = 0; t < taps; ++t) {
      g[t] += pres.d_err * 2.0 * du[t] + pres.d_energy * 2.0 * dw[t] +
              pres.d_cross * st.direct_cross[k][t];
    }
  }
  out.breakdown.total = out.breakdown.separation_term + out.breakdown.preservation_term;
  return out;
}

TrainReport Train(LinearSeparator& model, std::span<const MixtureInstance> dataset,
                  const TrainConfig& cfg) {
  ValidateConfig(cfg);
  if (dataset.empty()) throw Error(ErrorCode::kValidation, "empty training set");
  const int taps = model.filter_length();
  const std::size_t n = dataset.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  std::vector<UtteranceStatistics> stats_cache;
  if (cfg.engine == GradientEngine::kSecondOrder) {
    stats_cache.reserve(n);
    for (const MixtureInstance& m : dataset) {
      stats_cache.push_back(ComputeUtteranceStatistics(m, taps));
    }
  }

  TrainReport report;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng rng(DeriveSeed(cfg.seed, static_cast<std::uint64_t>(epoch) + 1));
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.UniformInt(i)]);

    EpochStats stats;
    stats.epoch = epoch;
    stats.min_preservation = std::numeric_limits<double>::infinity();
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t end = std::min(n, start + static_cast<std::size_t>(cfg.batch_size));
      std::vector<std::vector<double>> grad(kNumSpeakers, std::vector<double>(taps, 0.0));
      for (std::size_t b = start; b < end; ++b) {
        UtteranceGradient ug;
        try {
          ug = cfg.engine == GradientEngine::kSecondOrder
                   ? ComputeUtteranceGradient(model, stats_cache[order[b]], cfg.loss)
                   : ComputeUtteranceGradient(model, dataset[order[b]], cfg.loss);
        } catch (const Error& e) {
          if (!e.is_numerical()) throw;
          throw Error(ErrorCode::kDivergence,
                      "epoch " + std::to_string(epoch) + ": " + e.what());
        }
        if (!std::isfinite(ug.breakdown.total)) {
          throw Error(ErrorCode::kDivergence,
                      "epoch " + std::to_string(epoch) + ": non-finite loss");
        }
        stats.loss += ug.breakdown.total;
        stats.separation += ug.breakdown.separation_term;
        stats.preservation += ug.breakdown.preservation_term;
        stats.min_preservation =
            std::min(stats.min_preservation, ug.breakdown.preservation_term);
        for (int j = 0; j < kNumSpeakers; ++j) {
          for (int k = 0; k < taps; ++k) grad[j][k] += ug.taps[j][k];
        }
      }

      const double inv = 1.0 / static_cast<double>(end - start);
      double norm2 = 0.0;
      for (auto& g : grad) {
        for (double& v : g) {
          v *= inv;
          norm2 += v * v;
        }
      }
      const double norm = std::sqrt(norm2);
      if (!std::isfinite(norm)) {
        throw Error(ErrorCode::kDivergence,
                    "epoch " + std::to_string(epoch) + ": non-finite gradient");
      }
      const double scale = norm > cfg.grad_clip_l2 ? cfg.grad_clip_l2 / norm : 1.0;
      stats.max_clipped_grad_norm = std::max(stats.max_clipped_grad_norm, norm * scale);
      for (int j = 0; j < kNumSpeakers; ++j) {
        std::vector<double>& w = model.mutable_filter(j);
        for (int k = 0; k < taps; ++k) w[k] -= cfg.learning_rate * scale * grad[j][k];
      }
    }
    stats.loss /= static_cast<double>(n);
    stats.separation /= static_cast<double>(n);
    stats.preservation /= static_cast<double>(n);
    report.trace.push_back(stats);
  }
  report.table = Evaluate(model, dataset, cfg.loss.base_metric);
  return report;
}

EvaluationTable Evaluate(const LinearSeparator& model,
                         std::span<const MixtureInstance> dataset,
                         BaseMetric alignment) {
  if (model.num_sources() != kNumSpeakers) {
    throw Error(ErrorCode::kArity, "separator must have one filter per speaker");
  }
  EvaluationTable table;
  for (std::size_t u = 0; u < dataset.size(); ++u) {
    const MixtureInstance& m = dataset[u];
    const std::vector<Waveform> estimates = model.Forward(m.mixture);
    std::vector<std::vector<double>> cost(kNumSpeakers, std::vector<double>(kNumSpeakers));
    for (int j = 0; j < kNumSpeakers; ++j) {
      for (int k = 0; k < kNumSpeakers; ++k) {
        cost[j][k] = AlignmentCost(estimates[j], m.reverberant_targets[k], alignment);
      }
    }
    const Permutation perm = BestPermutation(cost, true);

    UtteranceMetrics row;
    row.index = u;
    row.bucket = m.overlap_bucket;
    row.permutation = perm;
    for (int j = 0; j < kNumSpeakers; ++j) {
      const Waveform& target = m.reverberant_targets[perm[j]];
      const Waveform& direct = m.direct_targets[perm[j]];
      const Waveform mapped = model.ForwardSource(j, direct);
      MetricMeans v;
      v.snr = Snr(estimates[j], target).clamped_db();
      v.si_sdr = SafeSiSdrDb(estimates[j], target);
      v.tsnr = Tsnr(mapped, direct).clamped_db();
      v.tsi_sdr = TsiSdr(mapped, direct).clamped_db();
      Accumulate(row.values, v);
    }
    Finish(row.values);
    row.values.count = 1;
    table.utterances.push_back(row);
    Accumulate(table.buckets[static_cast<int>(row.bucket)], row.values);
    Accumulate(table.overall, row.values);
  }
  for (MetricMeans& b : table.buckets) Finish(b);
  Finish(table.overall);
  return table;
}

nlohmann::json TrainReportTraceJson(const TrainReport& report) {
  nlohmann::json trace = nlohmann::json::array();
  for (const EpochStats& s : report.trace) {
    trace.push_back({{"epoch", s.epoch},
                     {"loss", s.loss},
                     {"separation", s.separation},
                     {"preservation", s.preservation},
                     {"min_preservation", s.min_preservation},
                     {"max_clipped_grad_norm", s.max_clipped_grad_norm}});
  }
  return {{"trace", trace}};
}

}  // namespace a2t
