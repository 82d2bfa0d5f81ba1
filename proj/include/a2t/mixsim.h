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


#ifndef A2T_MIXSIM_H_
#define A2T_MIXSIM_H_

#include <array>
#include <cstdint>
#include <string_view>

#include "a2t/rir.h"
#include "a2t/waveform.h"
#include "json.hpp"

namespace a2t {

inline constexpr int kNumSpeakers = 2;
inline constexpr double kWallClearance = 0.5;

struct SceneSpec {
  std::uint64_t seed = 0;
  RoomSpec room;
  std::array<Vec3, kNumSpeakers> speaker_positions;
  Vec3 noise_position;
  Vec3 mic_position;
  double overlap_ratio = 1.0;            // [0, 1]
  double relative_speaker_snr_db = 0.0;  // [0, 5] from the sampler
  double speech_to_noise_snr_db = 15.0;  // [10, 20] from the sampler
  double duration_s = 4.0;
  double direct_window_ms = 6.0;

  bool operator==(const SceneSpec&) const = default;
};

// Ranges for the quantities the sampler draws beyond the fixed recipe
// (room size, wall clearance, overlap and SNR ranges).
struct SamplerOptions {
  int sample_rate = kDefaultSampleRate;
  double duration_s = 4.0;
  double direct_window_ms = 6.0;
  double min_absorption = 0.2;
  double max_absorption = 0.6;
  int max_reflection_order = kDefaultReflectionOrder;
  double speed_of_sound = kDefaultSpeedOfSound;
};

enum class OverlapBucket { k0To25, k25To50, k50To75, k75To100 };
inline constexpr int kNumOverlapBuckets = 4;

// Half-open buckets, the last one closed: 0.25 belongs to [25, 50).
OverlapBucket BucketForOverlap(double overlap_ratio);
std::string_view OverlapBucketName(OverlapBucket bucket);  // e.g. "[25,50)"

struct MixtureInstance {
  Waveform mixture;
  std::array<Waveform, kNumSpeakers> reverberant_targets;
  std::array<Waveform, kNumSpeakers> direct_targets;
  std::array<Waveform, kNumSpeakers> late_targets;
  Waveform noise;  // reverberant noise
  // Pre-reverberation signals after shifting and rescaling.
  std::array<Waveform, kNumSpeakers> dry_sources;
  Waveform dry_noise;
  SceneSpec spec;
  OverlapBucket overlap_bucket = OverlapBucket::k75To100;
};

struct SynthesizedSources {
  std::array<Waveform, kNumSpeakers> speech;
  Waveform noise;  // may be shorter than the speech; tiled when rendered
};

// Draws every field of a scene from `seed`. Speakers and microphone are
// rejection-sampled to keep 0.5 m from all walls; the noise source only has
// to be inside the room.
SceneSpec SampleScene(std::uint64_t seed, const SamplerOptions& options = {});

// Two harmonic, syllable-modulated "speech-like" sources at separated pitch
// ranges and formants, plus white Gaussian noise. Deterministic in spec.seed.
SynthesizedSources SynthesizeSources(const SceneSpec& spec);

// Shift = round((1 - overlap) * min(len1, len2)); the buffer grows to fit.
std::size_t OverlapShift(double overlap_ratio, std::size_t len1, std::size_t len2);

// Full scene pipeline: synthesize, rescale speaker 2 against speaker 1, shift,
// tile and rescale noise against the speech sum, convolve with image-method
// RIRs, truncate to the dry buffer length, and sum.
MixtureInstance RenderScene(const SceneSpec& spec);

// max over lags of |xcorr(a, b)| / (|a| |b|).
double PeakNormalizedCrossCorrelation(const Waveform& a, const Waveform& b);

nlohmann::json SceneSpecToJson(const SceneSpec& spec);
SceneSpec SceneSpecFromJson(const nlohmann::json& j);

}  // namespace a2t

#endif  // A2T_MIXSIM_H_
