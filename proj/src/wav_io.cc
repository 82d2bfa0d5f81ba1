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


#include "a2t/wav_io.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "a2t/error.h"

namespace a2t {
namespace {

static_assert(std::endian::native == std::endian::little,
              "WAV codec assumes a little-endian host");

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

template <typename T>
T ReadLe(const std::vector<char>& buf, std::size_t pos) {
  T v;
  std::memcpy(&v, buf.data() + pos, sizeof(T));
  return v;
}

template <typename T>
void WriteLe(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

[[noreturn]] void Fail(const std::filesystem::path& path, const std::string& what) {
  throw Error(ErrorCode::kIo, path.string() + ": " + what);
}

}  // namespace

WavData ReadWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(path, "cannot open for reading");
  std::vector<char> buf((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0) {
    Fail(path, "not a RIFF/WAVE file");
  }

  std::uint16_t format_tag = 0, num_channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::size_t data_pos = 0, data_len = 0;
  bool have_data = false;
  std::size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const std::uint32_t chunk_len = ReadLe<std::uint32_t>(buf, pos + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(buf.data() + pos, "fmt ", 4) == 0) {
      if (chunk_len < 16 || body + 16 > buf.size()) Fail(path, "short fmt chunk");
      format_tag = ReadLe<std::uint16_t>(buf, body);
      num_channels = ReadLe<std::uint16_t>(buf, body + 2);
      rate = ReadLe<std::uint32_t>(buf, body + 4);
      bits = ReadLe<std::uint16_t>(buf, body + 14);
      if (format_tag == kFormatExtensible && chunk_len >= 26) {
        // The subformat GUID starts with the plain format tag.
        format_tag = ReadLe<std::uint16_t>(buf, body + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(buf.data() + pos, "data", 4) == 0) {
      data_pos = body;
      data_len = std::min<std::size_t>(chunk_len, buf.size() - body);
      have_data = true;
    }
    pos = body + chunk_len + (chunk_len & 1u);
  }
  if (!have_fmt || !have_data) Fail(path, "missing fmt or data chunk");
  if (num_channels == 0 || rate == 0) Fail(path, "invalid channel count or rate");

  WavData out;
  out.sample_rate = static_cast<int>(rate);
  if (format_tag == kFormatPcm && bits == 16) {
    out.format = WavFormat::kPcm16;
  } else if (format_tag == kFormatFloat && bits == 32) {
    out.format = WavFormat::kFloat32;
  } else {
    Fail(path, "unsupported encoding (tag " + std::to_string(format_tag) +
                   ", " + std::to_string(bits) + " bits)");
  }
  const std::size_t bytes_per_sample = bits / 8;
  const std::size_t frames = data_len / (bytes_per_sample * num_channels);
  out.channels.assign(num_channels, Waveform::Zeros(frames, out.sample_rate));
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t c = 0; c < num_channels; ++c) {
      const std::size_t at = data_pos + (f * num_channels + c) * bytes_per_sample;
      double v;
      if (out.format == WavFormat::kPcm16) {
        v = ReadLe<std::int16_t>(buf, at) / 32768.0;
      } else {
        v = ReadLe<float>(buf, at);
      }
      out.channels[c].samples[f] = v;
    }
  }
  return out;
}

void WriteWav(const std::filesystem::path& path, const WavData& data) {
  if (data.channels.empty()) Fail(path, "no channels to write");
  const std::size_t frames = data.channels.front().size();
  for (const Waveform& ch : data.channels) {
    if (ch.size() != frames) Fail(path, "channels differ in length");
  }
  const std::uint16_t num_channels = static_cast<std::uint16_t>(data.channels.size());
  const bool pcm = data.format == WavFormat::kPcm16;
  const std::uint16_t bits = pcm ? 16 : 32;
  const std::uint16_t block_align = num_channels * bits / 8;
  const std::uint32_t data_len = static_cast<std::uint32_t>(frames * block_align);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(path, "cannot open for writing");
  out.write("RIFF", 4);
  WriteLe<std::uint32_t>(out, 36 + data_len);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  WriteLe<std::uint32_t>(out, 16);
  WriteLe<std::uint16_t>(out, pcm ? kFormatPcm : kFormatFloat);
  WriteLe<std::uint16_t>(out, num_channels);
  WriteLe<std::uint32_t>(out, static_cast<std::uint32_t>(data.sample_rate));
  WriteLe<std::uint32_t>(out, static_cast<std::uint32_t>(data.sample_rate) * block_align);
  WriteLe<std::uint16_t>(out, block_align);
  WriteLe<std::uint16_t>(out, bits);
  out.write("data", 4);
  WriteLe<std::uint32_t>(out, data_len);
  for (std::size_t f = 0; f < frames; ++f) {
    for (const Waveform& ch : data.channels) {
      const double v = ch.samples[f];
      if (pcm) {
        const double scaled = std::clamp(std::round(v * 32768.0), -32768.0, 32767.0);
        WriteLe<std::int16_t>(out, static_cast<std::int16_t>(scaled));
      } else {
        WriteLe<float>(out, static_cast<float>(v));
      }
    }
  }
  if (!out) Fail(path, "write failed");
}

Waveform ReadMonoWav(const std::filesystem::path& path) {
  WavData data = ReadWav(path);
  if (data.channels.size() != 1) {
    Fail(path, "expected mono, found " + std::to_string(data.channels.size()) +
                   " channels");
  }
  return std::move(data.channels.front());
}

void WriteMonoWav(const std::filesystem::path& path, const Waveform& wave,
                  WavFormat format) {
  WavData data;
  data.channels = {wave};
  data.sample_rate = wave.sample_rate;
  data.format = format;
  WriteWav(path, data);
}

}  // namespace a2t
