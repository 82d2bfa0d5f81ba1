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


#ifndef A2T_METRICS_H_
#define A2T_METRICS_H_

#include <limits>
#include <span>
#include <string_view>

#include "a2t/waveform.h"

namespace a2t {

enum class MetricKind { kSnr, kSiSdr, kAlphaSnr, kAlphaSiSdr, kTsnr, kTsiSdr };

std::string_view MetricKindName(MetricKind kind);

// Infinite values serialize as +-300 dB; finite values are clamped to that
// range wherever a bounded number is required (CSV cells, per-pair losses).
inline constexpr double kMetricClampDb = 300.0;

// A decibel value that may be exactly +infinity or -infinity.
class MetricValue {
 public:
  enum class State { kFinite, kPositiveInfinity, kNegativeInfinity };

  static MetricValue Finite(double db, MetricKind kind) {
    return MetricValue(State::kFinite, db, kind);
  }
  static MetricValue PositiveInfinity(MetricKind kind) {
    return MetricValue(State::kPositiveInfinity,
                       std::numeric_limits<double>::infinity(), kind);
  }
  static MetricValue NegativeInfinity(MetricKind kind) {
    return MetricValue(State::kNegativeInfinity,
                       -std::numeric_limits<double>::infinity(), kind);
  }
  // Maps +-inf to the corresponding marker.
  static MetricValue FromDb(double db, MetricKind kind);

  State state() const { return state_; }
  MetricKind kind() const { return kind_; }
  bool is_finite() const { return state_ == State::kFinite; }
  bool is_positive_infinity() const { return state_ == State::kPositiveInfinity; }
  bool is_negative_infinity() const { return state_ == State::kNegativeInfinity; }

  // Exact value; +-infinity for the markers.
  double db() const { return db_; }
  // Value restricted to [-300, 300].
  double clamped_db() const;

 private:
  MetricValue(State state, double db, MetricKind kind)
      : state_(state), db_(db), kind_(kind) {}

  State state_;
  double db_;
  MetricKind kind_;
};

// 10 log10(|x|^2 / |x - x_hat|^2). +inf iff estimate == target exactly.
MetricValue Snr(const Waveform& estimate, const Waveform& target);

// Projection form: a = <x_hat, x> / <x, x>,
// 10 log10(|a x|^2 / |x_hat - a x|^2).
MetricValue SiSdr(const Waveform& estimate, const Waveform& target);

// Cosine form: 10 log10(c^2 / (1 - c^2)), c the cosine similarity.
MetricValue SiSdrCosineForm(const Waveform& estimate, const Waveform& target);

// 10 log10(c^2 / (1 + alpha - c^2)). Identical to the cosine form at alpha=0.
MetricValue AlphaSiSdr(const Waveform& estimate, const Waveform& target,
                       double alpha);

// 10 log10(|x|^2 / (|x - x_hat|^2 + alpha |x|^2)). Identical to Snr at alpha=0.
MetricValue AlphaSnr(const Waveform& estimate, const Waveform& target,
                     double alpha);

// SNR of the mapping applied to the direct path, against the direct path.
MetricValue Tsnr(const Waveform& mapped_direct, const Waveform& direct);

// SI-SDR counterpart of Tsnr. A silent mapping output is total distortion
// and yields -infinity rather than an error.
MetricValue TsiSdr(const Waveform& mapped_direct, const Waveform& direct);

// Raw-span forms shared with the loss code. They return +-infinity in place
// of the markers and apply the same error rules as the Waveform overloads.
double AlphaSnrDb(std::span<const double> estimate, std::span<const double> target,
                  double alpha);
double AlphaSiSdrDb(std::span<const double> estimate, std::span<const double> target,
                    double alpha);

}  // namespace a2t

#endif  // A2T_METRICS_H_
