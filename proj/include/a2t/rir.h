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


#ifndef A2T_RIR_H_
#define A2T_RIR_H_

#include <filesystem>

#include "a2t/waveform.h"

namespace a2t {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool operator==(const Vec3&) const = default;
};

double Distance(const Vec3& a, const Vec3& b);

inline constexpr double kDefaultSpeedOfSound = 343.0;
// Library defaults, not values taken from any published dataset recipe.
inline constexpr double kDefaultAbsorption = 0.4;
inline constexpr int kDefaultReflectionOrder = 10;
inline constexpr double kMaxRirSeconds = 0.5;
// Tail padding appended after the last image arrival; covers the widest
// supported direct-path window.
inline constexpr double kRirTailPadMs = 20.0;

// A shoebox room with one absorption coefficient for all six surfaces.
struct RoomSpec {
  Vec3 dimensions;  // length, width, height in meters
  double absorption = kDefaultAbsorption;  // in (0, 1]
  double speed_of_sound = kDefaultSpeedOfSound;
  int max_reflection_order = kDefaultReflectionOrder;
  int sample_rate = kDefaultSampleRate;

  bool operator==(const RoomSpec&) const = default;
};

struct RirFilter {
  Waveform taps;
  Vec3 source_position;
  Vec3 mic_position;
};

struct RirDecomposition {
  RirFilter direct;  // taps inside [peak - w, peak + w]
  RirFilter late;    // the residual
  double window_ms = 0.0;
  std::size_t peak_index = 0;
  std::size_t window_samples = 0;
};

struct RenderedSource {
  Waveform reverberant;
  Waveform direct_path;
  Waveform late;
};

// Image-method impulse response from `src` to `mic`.
//
// Image sources are enumerated up to room.max_reflection_order. Each image at
// distance d contributes (1 - absorption)^reflections / (4 pi d) at sample
// round(d / c * fs); coincident images add. The filter ends 20 ms after the
// latest enumerated arrival, capped at 0.5 s; later arrivals are dropped.
RirFilter SimulateRir(const RoomSpec& room, const Vec3& src, const Vec3& mic);

// Fraction of max|taps| that marks the first arrival.
inline constexpr double kFirstPeakFraction = 0.25;

// The "first peak": earliest tap with |h| >= kFirstPeakFraction * max|h|.
// Equals the global maximum whenever the direct arrival dominates.
std::size_t PeakIndex(const Waveform& taps);

// Direct-path window half-width in samples: round(window_ms * fs / 1000).
std::size_t WindowSamples(double window_ms, int sample_rate);

// Splits h into the taps within +-window_ms of the peak and the residual.
// direct + late reproduces h bit-exactly since each tap goes to one side.
RirDecomposition Decompose(const RirFilter& h, double window_ms);

// Convolves `source` with h = direct + late and with each part separately.
RenderedSource Render(const Waveform& source, const RirDecomposition& decomp);

// Taps as a 32-bit float WAV plus `<stem>.json` with geometry and window.
void WriteRir(const std::filesystem::path& wav_path, const RirDecomposition& decomp);
RirDecomposition ReadRir(const std::filesystem::path& wav_path);

}  // namespace a2t

#endif  // A2T_RIR_H_
