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


#ifndef A2T_WAV_IO_H_
#define A2T_WAV_IO_H_

#include <filesystem>
#include <vector>

#include "a2t/waveform.h"

namespace a2t {

enum class WavFormat {
  kPcm16,    // 16-bit integer PCM, samples / 32768 in [-1, 1).
  kFloat32,  // IEEE 754 single precision.
};

// Deinterleaved multichannel audio. All channels share one length.
struct WavData {
  std::vector<Waveform> channels;
  int sample_rate = kDefaultSampleRate;
  WavFormat format = WavFormat::kFloat32;
};

WavData ReadWav(const std::filesystem::path& path);
void WriteWav(const std::filesystem::path& path, const WavData& data);

// Mono helpers. ReadMonoWav fails unless the file has exactly one channel.
Waveform ReadMonoWav(const std::filesystem::path& path);
void WriteMonoWav(const std::filesystem::path& path, const Waveform& wave,
                  WavFormat format = WavFormat::kFloat32);

}  // namespace a2t

#endif  // A2T_WAV_IO_H_
