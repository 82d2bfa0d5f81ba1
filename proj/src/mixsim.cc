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


#include "a2t/mixsim.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "a2t/error.h"
#include "a2t/rng.h"

namespace a2t {
namespace {

constexpr int kMaxRejections = 1000;

// Stream indices for DeriveSeed.
constexpr std::uint64_t kSourceStream = 1;
constexpr std::uint64_t kNoiseStream = 3;

struct VoiceProfile {
  double min_f0, max_f0;
  double min_formant, max_formant;
  double tilt;
};

constexpr VoiceProfile kVoices[kNumSpeakers] = {
    {95.0, 135.0, 350.0, 700.0, 1.2},
    {185.0, 250.0, 900.0, 1600.0, 0.7},
};

Vec3 SampleInside(Rng& rng, const Vec3& dims, double clearance) {
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    const Vec3 p{rng.Uniform(0.0, dims.x), rng.Uniform(0.0, dims.y),
                 rng.Uniform(0.0, dims.z)};
    const bool ok = p.x > clearance && p.x < dims.x - clearance &&
                    p.y > clearance && p.y < dims.y - clearance &&
                    p.z > clearance && p.z < dims.z - clearance;
    if (ok) return p;
  }
  throw Error(ErrorCode::kGeometry, "position rejection sampling exhausted");
}

// Syllable envelope: raised-cosine bursts separated by pauses.
std::vector<double> SyllableEnvelope(Rng& rng, std::size_t n, int fs) {
  std::vector<double> env(n, 0.0);
  std::size_t t = static_cast<std::size_t>(rng.Uniform(0.0, 0.08) * fs);
  while (t < n) {
    const std::size_t len = static_cast<std::size_t>(rng.Uniform(0.10, 0.28) * fs);
    const double peak = rng.Uniform(0.5, 1.0);
    for (std::size_t i = 0; i < len && t + i < n; ++i) {
      const double phase = static_cast<double>(i) / static_cast<double>(len);
      env[t + i] = peak * 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * phase));
    }
    t += len + static_cast<std::size_t>(rng.Uniform(0.03, 0.20) * fs);
  }
  return env;
}

Waveform SynthesizeVoice(Rng& rng, const VoiceProfile& voice, std::size_t n, int fs) {
  const double f0 = rng.Uniform(voice.min_f0, voice.max_f0);
  const double formant = rng.Uniform(voice.min_formant, voice.max_formant);
  const double vibrato_rate = rng.Uniform(3.0, 6.0);
  const double vibrato_phase = rng.Uniform(0.0, 2.0 * std::numbers::pi);
  const double glide = rng.Uniform(-0.15, 0.15);  // relative f0 drift per second
  const double nyquist_guard = 0.45 * fs;
  const int harmonics = std::max(1, static_cast<int>(nyquist_guard / (f0 * 1.25)));

  std::vector<double> amp(harmonics), phase0(harmonics);
  for (int k = 0; k < harmonics; ++k) {
    const double freq = f0 * (k + 1);
    const double resonance = std::exp(-std::pow((freq - formant) / (0.6 * formant), 2));
    amp[k] = (0.3 + resonance) / std::pow(k + 1.0, voice.tilt);
    phase0[k] = rng.Uniform(0.0, 2.0 * std::numbers::pi);
  }
  const std::vector<double> env = SyllableEnvelope(rng, n, fs);

  std::vector<double> out(n, 0.0);
  double phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    const double inst_f0 =
        f0 * (1.0 + glide * t) *
        (1.0 + 0.03 * std::sin(2.0 * std::numbers::pi * vibrato_rate * t + vibrato_phase));
    phase += 2.0 * std::numbers::pi * inst_f0 / fs;
    if (env[i] == 0.0) continue;
    double v = 0.0;
    for (int k = 0; k < harmonics; ++k) {
      if (inst_f0 * (k + 1) >= nyquist_guard) break;
      v += amp[k] * std::sin((k + 1) * phase + phase0[k]);
    }
    out[i] = env[i] * v;
  }
  return Waveform(std::move(out), fs);
}

Waveform Tile(const Waveform& a, std::size_t n) {
  Waveform out = Waveform::Zeros(n, a.sample_rate);
  for (std::size_t i = 0; i < n; ++i) out.samples[i] = a.samples[i % a.size()];
  return out;
}

nlohmann::json Vec3Json(const Vec3& v) { return {v.x, v.y, v.z}; }
Vec3 Vec3From(const nlohmann::json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

}  // namespace

OverlapBucket BucketForOverlap(double overlap_ratio) {
  if (overlap_ratio < 0.25) return OverlapBucket::k0To25;
  if (overlap_ratio < 0.50) return OverlapBucket::k25To50;
  if (overlap_ratio < 0.75) return OverlapBucket::k50To75;
  return OverlapBucket::k75To100;
}

std::string_view OverlapBucketName(OverlapBucket bucket) {
  switch (bucket) {
    case OverlapBucket::k0To25: return "[0,25)";
    case OverlapBucket::k25To50: return "[25,50)";
    case OverlapBucket::k50To75: return "[50,75)";
    case OverlapBucket::k75To100: return "[75,100]";
  }
  return "?";
}

SceneSpec SampleScene(std::uint64_t seed, const SamplerOptions& options) {
  Rng rng(seed);
  SceneSpec spec;
  spec.seed = seed;
  spec.room.dimensions = {rng.Uniform(3.0, 10.0), rng.Uniform(3.0, 10.0),
                          rng.Uniform(2.5, 4.0)};
  spec.room.absorption = rng.Uniform(options.min_absorption, options.max_absorption);
  spec.room.max_reflection_order = options.max_reflection_order;
  spec.room.speed_of_sound = options.speed_of_sound;
  spec.room.sample_rate = options.sample_rate;
  spec.mic_position = SampleInside(rng, spec.room.dimensions, kWallClearance);
  for (Vec3& p : spec.speaker_positions) {
    do {
      p = SampleInside(rng, spec.room.dimensions, kWallClearance);
    } while (p == spec.mic_position);
  }
  do {
    spec.noise_position = SampleInside(rng, spec.room.dimensions, 0.0);
  } while (spec.noise_position == spec.mic_position);
  spec.overlap_ratio = rng.Uniform(0.0, 1.0);
  spec.relative_speaker_snr_db = rng.Uniform(0.0, 5.0);
  spec.speech_to_noise_snr_db = rng.Uniform(10.0, 20.0);
  spec.duration_s = options.duration_s;
  spec.direct_window_ms = options.direct_window_ms;
  return spec;
}

SynthesizedSources SynthesizeSources(const SceneSpec& spec) {
  const int fs = spec.room.sample_rate;
  const std::size_t n =
      static_cast<std::size_t>(std::lround(spec.duration_s * fs));
  if (n == 0) throw Error(ErrorCode::kValidation, "scene duration is zero samples");
  SynthesizedSources out;
  for (int j = 0; j < kNumSpeakers; ++j) {
    Rng rng(DeriveSeed(spec.seed, kSourceStream + j));
    out.speech[j] = SynthesizeVoice(rng, kVoices[j], n, fs);
  }
  Rng noise_rng(DeriveSeed(spec.seed, kNoiseStream));
  const std::size_t noise_len = std::max<std::size_t>(
      1, static_cast<std::size_t>(noise_rng.Uniform(0.5, 1.0) * n));
  out.noise = Waveform::Zeros(noise_len, fs);
  for (double& v : out.noise.samples) v = noise_rng.Normal();
  return out;
}

std::size_t OverlapShift(double overlap_ratio, std::size_t len1, std::size_t len2) {
  return static_cast<std::size_t>(
      std::lround((1.0 - overlap_ratio) * static_cast<double>(std::min(len1, len2))));
}

MixtureInstance RenderScene(const SceneSpec& spec) {
  if (spec.overlap_ratio < 0.0 || spec.overlap_ratio > 1.0) {
    throw Error(ErrorCode::kValidation, "overlap_ratio outside [0, 1]");
  }
  SynthesizedSources src = SynthesizeSources(spec);
  const Waveform& first = src.speech[0];
  const Waveform second =
      RescaleToRelativeSnr(src.speech[1], first, spec.relative_speaker_snr_db);

  const std::size_t shift = OverlapShift(spec.overlap_ratio, first.size(), second.size());
  const std::size_t total = std::max(first.size(), shift + second.size());

  MixtureInstance m;
  m.spec = spec;
  m.overlap_bucket = BucketForOverlap(spec.overlap_ratio);
  m.dry_sources[0] = Shift(first, 0, total);
  m.dry_sources[1] = Shift(second, static_cast<std::ptrdiff_t>(shift), total);
  const Waveform speech_sum = Add(m.dry_sources[0], m.dry_sources[1]);
  m.dry_noise = RescaleToRelativeSnr(Tile(src.noise, total), speech_sum,
                                     spec.speech_to_noise_snr_db);

  m.mixture = Waveform::Zeros(total, spec.room.sample_rate);
  for (int j = 0; j < kNumSpeakers; ++j) {
    const RirFilter h = SimulateRir(spec.room, spec.speaker_positions[j], spec.mic_position);
    const RirDecomposition decomp = Decompose(h, spec.direct_window_ms);
    const RenderedSource r = Render(m.dry_sources[j], decomp);
    m.reverberant_targets[j] = Resized(r.reverberant, total);
    m.direct_targets[j] = Resized(r.direct_path, total);
    m.late_targets[j] = Resized(r.late, total);
  }
  const RirFilter hn = SimulateRir(spec.room, spec.noise_position, spec.mic_position);
  m.noise = Resized(ConvolveFull(m.dry_noise, hn.taps), total);
  for (std::size_t i = 0; i < total; ++i) {
    m.mixture.samples[i] = m.reverberant_targets[0].samples[i] +
                           m.reverberant_targets[1].samples[i] + m.noise.samples[i];
  }
  return m;
}

double PeakNormalizedCrossCorrelation(const Waveform& a, const Waveform& b) {
  CheckSameRate(a, b, "cross-correlation");
  const double norm = std::sqrt(Energy(a) * Energy(b));
  if (norm == 0.0) throw Error(ErrorCode::kDegenerate, "cross-correlation of silence");
  Waveform reversed = b;
  std::reverse(reversed.samples.begin(), reversed.samples.end());
  const Waveform xc = ConvolveFull(a, reversed);
  double peak = 0.0;
  for (double v : xc.samples) peak = std::max(peak, std::abs(v));
  return peak / norm;
}

nlohmann::json SceneSpecToJson(const SceneSpec& spec) {
  return {
      {"seed", spec.seed},
      {"room",
       {{"dimensions", Vec3Json(spec.room.dimensions)},
        {"absorption", spec.room.absorption},
        {"speed_of_sound", spec.room.speed_of_sound},
        {"max_reflection_order", spec.room.max_reflection_order},
        {"sample_rate", spec.room.sample_rate}}},
      {"speaker_positions",
       {Vec3Json(spec.speaker_positions[0]), Vec3Json(spec.speaker_positions[1])}},
      {"noise_position", Vec3Json(spec.noise_position)},
      {"mic_position", Vec3Json(spec.mic_position)},
      {"overlap_ratio", spec.overlap_ratio},
      {"relative_speaker_snr_db", spec.relative_speaker_snr_db},
      {"speech_to_noise_snr_db", spec.speech_to_noise_snr_db},
      {"duration_s", spec.duration_s},
      {"direct_window_ms", spec.direct_window_ms},
  };
}

SceneSpec SceneSpecFromJson(const nlohmann::json& j) {
  try {
    SceneSpec spec;
    spec.seed = j.at("seed").get<std::uint64_t>();
    const auto& room = j.at("room");
    spec.room.dimensions = Vec3From(room.at("dimensions"));
    spec.room.absorption = room.at("absorption").get<double>();
    spec.room.speed_of_sound = room.at("speed_of_sound").get<double>();
    spec.room.max_reflection_order = room.at("max_reflection_order").get<int>();
    spec.room.sample_rate = room.at("sample_rate").get<int>();
    spec.speaker_positions[0] = Vec3From(j.at("speaker_positions").at(0));
    spec.speaker_positions[1] = Vec3From(j.at("speaker_positions").at(1));
    spec.noise_position = Vec3From(j.at("noise_position"));
    spec.mic_position = Vec3From(j.at("mic_position"));
    spec.overlap_ratio = j.at("overlap_ratio").get<double>();
    spec.relative_speaker_snr_db = j.at("relative_speaker_snr_db").get<double>();
    spec.speech_to_noise_snr_db = j.at("speech_to_noise_snr_db").get<double>();
    spec.duration_s = j.at("duration_s").get<double>();
    spec.direct_window_ms = j.at("direct_window_ms").get<double>();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kValidation, std::string("scene spec: ") + e.what());
  }
}

}  // namespace a2t
