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


#include "a2t/rir.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <string>

#include "a2t/error.h"
#include "a2t/wav_io.h"
#include "json.hpp"

namespace a2t {
namespace {

bool StrictlyInside(const Vec3& p, const Vec3& dims) {
  return p.x > 0.0 && p.x < dims.x && p.y > 0.0 && p.y < dims.y && p.z > 0.0 &&
         p.z < dims.z;
}

std::string Describe(const Vec3& p) {
  return "(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ", " +
         std::to_string(p.z) + ")";
}

// Image coordinate along one axis for lattice index i, where |i| is the
// number of reflections off this axis' walls.
double ImageCoordinate(int i, double source, double extent) {
  if (i % 2 == 0) return source + i * extent;
  return -source + (i + 1) * extent;
}

nlohmann::json ToJson(const Vec3& v) { return {v.x, v.y, v.z}; }

Vec3 Vec3FromJson(const nlohmann::json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

}  // namespace

double Distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

RirFilter SimulateRir(const RoomSpec& room, const Vec3& src, const Vec3& mic) {
  const Vec3& dims = room.dimensions;
  if (!(dims.x > 0.0 && dims.y > 0.0 && dims.z > 0.0)) {
    throw Error(ErrorCode::kGeometry, "room dimensions must be positive");
  }
  if (!(room.absorption > 0.0 && room.absorption <= 1.0)) {
    throw Error(ErrorCode::kGeometry, "absorption must lie in (0, 1]");
  }
  if (room.max_reflection_order < 0 || room.sample_rate <= 0 ||
      room.speed_of_sound <= 0.0) {
    throw Error(ErrorCode::kGeometry, "invalid reflection order, rate or speed");
  }
  if (!StrictlyInside(src, dims)) {
    throw Error(ErrorCode::kGeometry, "source " + Describe(src) + " outside room");
  }
  if (!StrictlyInside(mic, dims)) {
    throw Error(ErrorCode::kGeometry, "microphone " + Describe(mic) + " outside room");
  }
  if (src == mic) {
    throw Error(ErrorCode::kGeometry, "source and microphone coincide");
  }

  struct Arrival {
    double delay_samples;
    double amplitude;
  };
  const int order = room.max_reflection_order;
  const double reflection = 1.0 - room.absorption;
  const double samples_per_meter = room.sample_rate / room.speed_of_sound;
  std::vector<Arrival> arrivals;
  double latest = 0.0;
  for (int i = -order; i <= order; ++i) {
    const double ix = ImageCoordinate(i, src.x, dims.x) - mic.x;
    const int rest_i = order - std::abs(i);
    for (int j = -rest_i; j <= rest_i; ++j) {
      const double iy = ImageCoordinate(j, src.y, dims.y) - mic.y;
      const int rest_j = rest_i - std::abs(j);
      for (int k = -rest_j; k <= rest_j; ++k) {
        const double iz = ImageCoordinate(k, src.z, dims.z) - mic.z;
        const int reflections = std::abs(i) + std::abs(j) + std::abs(k);
        const double gain = reflections == 0 ? 1.0 : std::pow(reflection, reflections);
        if (gain == 0.0) continue;
        const double d = std::sqrt(ix * ix + iy * iy + iz * iz);
        const double delay = d * samples_per_meter;
        arrivals.push_back({delay, gain / (4.0 * std::numbers::pi * d)});
        latest = std::max(latest, delay);
      }
    }
  }

  const std::size_t cap =
      static_cast<std::size_t>(std::lround(kMaxRirSeconds * room.sample_rate));
  const std::size_t pad = WindowSamples(kRirTailPadMs, room.sample_rate);
  const std::size_t length =
      std::min(cap, static_cast<std::size_t>(std::lround(latest)) + pad + 1);

  RirFilter h;
  h.taps = Waveform::Zeros(length, room.sample_rate);
  h.source_position = src;
  h.mic_position = mic;
  for (const Arrival& a : arrivals) {
    const std::size_t n = static_cast<std::size_t>(std::lround(a.delay_samples));
    if (n < length) h.taps.samples[n] += a.amplitude;
  }
  return h;
}

std::size_t PeakIndex(const Waveform& taps) {
  if (taps.empty()) throw Error(ErrorCode::kDimension, "empty filter has no peak");
  double largest = 0.0;
  for (double v : taps.samples) largest = std::max(largest, std::abs(v));
  // Coincident reflections can stack above the direct arrival, so the global
  // maximum is not always the first arrival.
  const double threshold = kFirstPeakFraction * largest;
  std::size_t i = 0;
  while (std::abs(taps.samples[i]) < threshold) ++i;
  return i;
}

std::size_t WindowSamples(double window_ms, int sample_rate) {
  return static_cast<std::size_t>(std::lround(window_ms * sample_rate / 1000.0));
}

RirDecomposition Decompose(const RirFilter& h, double window_ms) {
  if (!(window_ms > 0.0)) {
    throw Error(ErrorCode::kValidation, "direct-path window must be positive");
  }
  RirDecomposition out;
  out.window_ms = window_ms;
  out.peak_index = PeakIndex(h.taps);
  out.window_samples = WindowSamples(window_ms, h.taps.sample_rate);
  const std::size_t lo =
      out.peak_index >= out.window_samples ? out.peak_index - out.window_samples : 0;
  const std::size_t hi =
      std::min(h.taps.size() - 1, out.peak_index + out.window_samples);

  out.direct = h;
  out.late = h;
  for (std::size_t i = 0; i < h.taps.size(); ++i) {
    if (i >= lo && i <= hi) {
      out.late.taps.samples[i] = 0.0;
    } else {
      out.direct.taps.samples[i] = 0.0;
    }
  }
  return out;
}

RenderedSource Render(const Waveform& source, const RirDecomposition& decomp) {
  const Waveform h = Add(decomp.direct.taps, decomp.late.taps);
  RenderedSource out;
  out.reverberant = ConvolveFull(source, h);
  out.direct_path = ConvolveFull(source, decomp.direct.taps);
  out.late = ConvolveFull(source, decomp.late.taps);
  return out;
}

void WriteRir(const std::filesystem::path& wav_path, const RirDecomposition& decomp) {
  const Waveform h = Add(decomp.direct.taps, decomp.late.taps);
  WriteMonoWav(wav_path, h, WavFormat::kFloat32);
  nlohmann::json side = {
      {"sample_rate", h.sample_rate},
      {"num_taps", h.size()},
      {"source_position", ToJson(decomp.direct.source_position)},
      {"mic_position", ToJson(decomp.direct.mic_position)},
      {"window_ms", decomp.window_ms},
      {"window_samples", decomp.window_samples},
      {"peak_index", decomp.peak_index},
  };
  std::filesystem::path json_path = wav_path;
  json_path.replace_extension(".json");
  std::ofstream out(json_path);
  if (!out) throw Error(ErrorCode::kIo, json_path.string() + ": cannot open");
  out << side.dump(2) << "\n";
}

RirDecomposition ReadRir(const std::filesystem::path& wav_path) {
  std::filesystem::path json_path = wav_path;
  json_path.replace_extension(".json");
  std::ifstream in(json_path);
  if (!in) throw Error(ErrorCode::kIo, json_path.string() + ": cannot open");
  nlohmann::json side;
  try {
    in >> side;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIo, json_path.string() + ": " + e.what());
  }
  RirFilter h;
  h.taps = ReadMonoWav(wav_path);
  h.source_position = Vec3FromJson(side.at("source_position"));
  h.mic_position = Vec3FromJson(side.at("mic_position"));
  RirDecomposition out = Decompose(h, side.at("window_ms").get<double>());
  if (out.peak_index != side.at("peak_index").get<std::size_t>()) {
    throw Error(ErrorCode::kIo, json_path.string() + ": peak index does not match taps");
  }
  return out;
}

}  // namespace a2t
