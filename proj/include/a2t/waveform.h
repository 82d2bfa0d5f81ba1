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


#ifndef A2T_WAVEFORM_H_
#define A2T_WAVEFORM_H_

#include <cstddef>
#include <span>
#include <vector>

namespace a2t {

inline constexpr int kDefaultSampleRate = 16000;

// A sampled mono signal. Amplitudes are dimensionless doubles.
struct Waveform {
  std::vector<double> samples;
  int sample_rate = kDefaultSampleRate;

  Waveform() = default;
  Waveform(std::vector<double> s, int rate) : samples(std::move(s)), sample_rate(rate) {}

  static Waveform Zeros(std::size_t n, int rate) {
    return Waveform(std::vector<double>(n, 0.0), rate);
  }

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double operator[](std::size_t i) const { return samples[i]; }
  double& operator[](std::size_t i) { return samples[i]; }
  std::span<const double> view() const { return samples; }

  bool operator==(const Waveform&) const = default;
};

// Filter lengths at or above this use FFT convolution.
inline constexpr std::size_t kDirectConvolutionMaxTaps = 512;

double Dot(std::span<const double> a, std::span<const double> b);
double Dot(const Waveform& a, const Waveform& b);
double Energy(std::span<const double> a);
double Energy(const Waveform& a);

// Linear convolution, output length len(signal) + len(filter) - 1.
Waveform ConvolveFull(const Waveform& signal, const Waveform& filter);

// Direct O(N*K) convolution regardless of filter length.
std::vector<double> ConvolveDirect(std::span<const double> signal,
                                   std::span<const double> filter);

// Zero-padded placement of `a` at `offset` in a buffer of `total_len`.
Waveform Shift(const Waveform& a, std::ptrdiff_t offset, std::size_t total_len);

// Returns g * target such that
// 10 log10(Energy(reference) / Energy(g * target)) == snr_db.
Waveform RescaleToRelativeSnr(const Waveform& target, const Waveform& reference,
                              double snr_db);

// 10 log10(Energy(reference) / Energy(target)).
double RelativeSnrDb(const Waveform& target, const Waveform& reference);

Waveform Add(const Waveform& a, const Waveform& b);
Waveform Subtract(const Waveform& a, const Waveform& b);
Waveform Scale(const Waveform& a, double gain);

// Truncates or zero-pads to exactly n samples.
Waveform Resized(const Waveform& a, std::size_t n);

// Validation helpers shared by the other modules.
void CheckSameLength(const Waveform& a, const Waveform& b, const char* what);
void CheckSameRate(const Waveform& a, const Waveform& b, const char* what);

}  // namespace a2t

#endif  // A2T_WAVEFORM_H_
