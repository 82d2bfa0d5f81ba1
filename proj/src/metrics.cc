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


#include "a2t/metrics.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "a2t/error.h"

namespace a2t {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void CheckPair(std::span<const double> estimate, std::span<const double> target,
               const char* what) {
  if (estimate.size() != target.size()) {
    throw Error(ErrorCode::kDimension,
                std::string(what) + ": estimate has " +
                    std::to_string(estimate.size()) + " samples, target " +
                    std::to_string(target.size()));
  }
}

void CheckAlpha(double alpha) {
  if (!(alpha >= 0.0)) {
    throw Error(ErrorCode::kValidation, "alpha must be non-negative");
  }
}

void CheckPairWave(const Waveform& estimate, const Waveform& target,
                   const char* what) {
  CheckSameRate(estimate, target, what);
  CheckPair(estimate.view(), target.view(), what);
}

// Squared cosine similarity with the degeneracy rules of SI-SDR.
double SquaredCosine(std::span<const double> estimate,
                     std::span<const double> target, const char* what) {
  CheckPair(estimate, target, what);
  const double a = Energy(target);
  const double e = Energy(estimate);
  if (a == 0.0) {
    throw Error(ErrorCode::kDegenerate, std::string(what) + ": zero-energy target");
  }
  if (e == 0.0) {
    throw Error(ErrorCode::kDegenerate, std::string(what) + ": zero-energy estimate");
  }
  const double b = Dot(estimate, target);
  return b * b / (a * e);
}

double CosineFamilyDb(double c2, double alpha) {
  if (c2 == 0.0) return -kInf;
  const double denom = (1.0 + alpha) - c2;
  if (denom <= 0.0) return kInf;
  return 10.0 * std::log10(c2 / denom);
}

}  // namespace

std::string_view MetricKindName(MetricKind kind) {
  switch (kind) {
    case MetricKind::kSnr: return "SNR";
    case MetricKind::kSiSdr: return "SI-SDR";
    case MetricKind::kAlphaSnr: return "alpha-SNR";
    case MetricKind::kAlphaSiSdr: return "alpha-SI-SDR";
    case MetricKind::kTsnr: return "TSNR";
    case MetricKind::kTsiSdr: return "TSI-SDR";
  }
  return "?";
}

MetricValue MetricValue::FromDb(double db, MetricKind kind) {
  if (db == kInf) return PositiveInfinity(kind);
  if (db == -kInf) return NegativeInfinity(kind);
  return Finite(db, kind);
}

double MetricValue::clamped_db() const {
  switch (state_) {
    case State::kPositiveInfinity: return kMetricClampDb;
    case State::kNegativeInfinity: return -kMetricClampDb;
    case State::kFinite: break;
  }
  return std::clamp(db_, -kMetricClampDb, kMetricClampDb);
}

double AlphaSnrDb(std::span<const double> estimate, std::span<const double> target,
                  double alpha) {
  CheckPair(estimate, target, "snr");
  CheckAlpha(alpha);
  const double et = Energy(target);
  if (et == 0.0) throw Error(ErrorCode::kDegenerate, "snr: zero-energy target");
  double err = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double d = target[i] - estimate[i];
    err += d * d;
  }
  const double denom = err + alpha * et;
  if (denom == 0.0) return kInf;
  return 10.0 * std::log10(et / denom);
}

double AlphaSiSdrDb(std::span<const double> estimate, std::span<const double> target,
                    double alpha) {
  CheckAlpha(alpha);
  return CosineFamilyDb(SquaredCosine(estimate, target, "si-sdr"), alpha);
}

MetricValue Snr(const Waveform& estimate, const Waveform& target) {
  CheckPairWave(estimate, target, "snr");
  return MetricValue::FromDb(AlphaSnrDb(estimate.view(), target.view(), 0.0),
                             MetricKind::kSnr);
}

MetricValue AlphaSnr(const Waveform& estimate, const Waveform& target,
                     double alpha) {
  CheckPairWave(estimate, target, "alpha-snr");
  return MetricValue::FromDb(AlphaSnrDb(estimate.view(), target.view(), alpha),
                             MetricKind::kAlphaSnr);
}

MetricValue SiSdr(const Waveform& estimate, const Waveform& target) {
  CheckPairWave(estimate, target, "si-sdr");
  const double a = Energy(target);
  const double e = Energy(estimate);
  if (a == 0.0) throw Error(ErrorCode::kDegenerate, "si-sdr: zero-energy target");
  if (e == 0.0) throw Error(ErrorCode::kDegenerate, "si-sdr: zero-energy estimate");
  const double scale = Dot(estimate, target) / a;
  double projected = 0.0, residual = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double p = scale * target.samples[i];
    const double r = estimate.samples[i] - p;
    projected += p * p;
    residual += r * r;
  }
  if (projected == 0.0) return MetricValue::NegativeInfinity(MetricKind::kSiSdr);
  if (residual == 0.0) return MetricValue::PositiveInfinity(MetricKind::kSiSdr);
  return MetricValue::Finite(10.0 * std::log10(projected / residual),
                             MetricKind::kSiSdr);
}

MetricValue SiSdrCosineForm(const Waveform& estimate, const Waveform& target) {
  CheckPairWave(estimate, target, "si-sdr");
  return MetricValue::FromDb(AlphaSiSdrDb(estimate.view(), target.view(), 0.0),
                             MetricKind::kSiSdr);
}

MetricValue AlphaSiSdr(const Waveform& estimate, const Waveform& target,
                       double alpha) {
  CheckPairWave(estimate, target, "alpha-si-sdr");
  return MetricValue::FromDb(AlphaSiSdrDb(estimate.view(), target.view(), alpha),
                             MetricKind::kAlphaSiSdr);
}

MetricValue Tsnr(const Waveform& mapped_direct, const Waveform& direct) {
  CheckPairWave(mapped_direct, direct, "tsnr");
  return MetricValue::FromDb(AlphaSnrDb(mapped_direct.view(), direct.view(), 0.0),
                             MetricKind::kTsnr);
}

MetricValue TsiSdr(const Waveform& mapped_direct, const Waveform& direct) {
  CheckPairWave(mapped_direct, direct, "tsi-sdr");
  if (Energy(direct) == 0.0) {
    throw Error(ErrorCode::kDegenerate, "tsi-sdr: zero-energy direct path");
  }
  if (Energy(mapped_direct) == 0.0) {
    return MetricValue::NegativeInfinity(MetricKind::kTsiSdr);
  }
  const MetricValue v = SiSdr(mapped_direct, direct);
  return MetricValue::FromDb(v.db(), MetricKind::kTsiSdr);
}

}  // namespace a2t
