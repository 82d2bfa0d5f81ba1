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


#include "a2t/waveform.h"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

#include "a2t/error.h"

namespace a2t {
namespace {

// The FFTW planner is not reentrant; execution on distinct plans is.
std::mutex& PlannerMutex() {
  static std::mutex mu;
  return mu;
}

std::size_t NextPowerOfTwo(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<double> ConvolveFft(std::span<const double> signal,
                                std::span<const double> filter) {
  const std::size_t out_len = signal.size() + filter.size() - 1;
  const std::size_t nfft = NextPowerOfTwo(out_len);
  const std::size_t nbins = nfft / 2 + 1;

  double* time = fftw_alloc_real(nfft);
  fftw_complex* spec_a = fftw_alloc_complex(nbins);
  fftw_complex* spec_b = fftw_alloc_complex(nbins);
  fftw_plan forward_a, forward_b, inverse;
  {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    forward_a = fftw_plan_dft_r2c_1d(static_cast<int>(nfft), time, spec_a,
                                     FFTW_ESTIMATE);
    forward_b = fftw_plan_dft_r2c_1d(static_cast<int>(nfft), time, spec_b,
                                     FFTW_ESTIMATE);
    inverse = fftw_plan_dft_c2r_1d(static_cast<int>(nfft), spec_a, time,
                                   FFTW_ESTIMATE);
  }

  std::fill(time, time + nfft, 0.0);
  std::copy(signal.begin(), signal.end(), time);
  fftw_execute(forward_a);
  std::fill(time, time + nfft, 0.0);
  std::copy(filter.begin(), filter.end(), time);
  fftw_execute(forward_b);
  for (std::size_t k = 0; k < nbins; ++k) {
    const double re = spec_a[k][0] * spec_b[k][0] - spec_a[k][1] * spec_b[k][1];
    const double im = spec_a[k][0] * spec_b[k][1] + spec_a[k][1] * spec_b[k][0];
    spec_a[k][0] = re;
    spec_a[k][1] = im;
  }
  fftw_execute(inverse);

  std::vector<double> out(out_len);
  const double norm = 1.0 / static_cast<double>(nfft);
  for (std::size_t i = 0; i < out_len; ++i) out[i] = time[i] * norm;

  {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    fftw_destroy_plan(forward_a);
    fftw_destroy_plan(forward_b);
    fftw_destroy_plan(inverse);
  }
  fftw_free(time);
  fftw_free(spec_a);
  fftw_free(spec_b);
  return out;
}

}  // namespace

void CheckSameLength(const Waveform& a, const Waveform& b, const char* what) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimension,
                std::string(what) + ": lengths " + std::to_string(a.size()) +
                    " and " + std::to_string(b.size()) + " differ");
  }
}

void CheckSameRate(const Waveform& a, const Waveform& b, const char* what) {
  if (a.sample_rate != b.sample_rate) {
    throw Error(ErrorCode::kRate,
                std::string(what) + ": sample rates " +
                    std::to_string(a.sample_rate) + " and " +
                    std::to_string(b.sample_rate) + " differ");
  }
}

double Dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimension,
                "dot: lengths " + std::to_string(a.size()) + " and " +
                    std::to_string(b.size()) + " differ");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double Dot(const Waveform& a, const Waveform& b) {
  CheckSameRate(a, b, "dot");
  return Dot(a.view(), b.view());
}

double Energy(std::span<const double> a) {
  double sum = 0.0;
  for (double v : a) sum += v * v;
  return sum;
}

double Energy(const Waveform& a) { return Energy(a.view()); }

std::vector<double> ConvolveDirect(std::span<const double> signal,
                                   std::span<const double> filter) {
  if (signal.empty() || filter.empty()) return {};
  std::vector<double> out(signal.size() + filter.size() - 1, 0.0);
  for (std::size_t k = 0; k < filter.size(); ++k) {
    const double h = filter[k];
    if (h == 0.0) continue;
    double* dst = out.data() + k;
    for (std::size_t n = 0; n < signal.size(); ++n) dst[n] += h * signal[n];
  }
  return out;
}

Waveform ConvolveFull(const Waveform& signal, const Waveform& filter) {
  CheckSameRate(signal, filter, "convolve_full");
  if (signal.empty() || filter.empty()) {
    throw Error(ErrorCode::kDimension, "convolve_full: empty input");
  }
  const std::size_t shorter = std::min(signal.size(), filter.size());
  if (shorter < kDirectConvolutionMaxTaps) {
    // Keep the short operand as the inner "filter" loop.
    if (filter.size() <= signal.size()) {
      return Waveform(ConvolveDirect(signal.view(), filter.view()),
                      signal.sample_rate);
    }
    return Waveform(ConvolveDirect(filter.view(), signal.view()),
                    signal.sample_rate);
  }
  return Waveform(ConvolveFft(signal.view(), filter.view()), signal.sample_rate);
}

Waveform Shift(const Waveform& a, std::ptrdiff_t offset, std::size_t total_len) {
  if (offset < 0 || static_cast<std::size_t>(offset) + a.size() > total_len) {
    throw Error(ErrorCode::kPlacement,
                "shift: offset " + std::to_string(offset) + " with length " +
                    std::to_string(a.size()) + " exceeds buffer of " +
                    std::to_string(total_len));
  }
  Waveform out = Waveform::Zeros(total_len, a.sample_rate);
  std::copy(a.samples.begin(), a.samples.end(), out.samples.begin() + offset);
  return out;
}

double RelativeSnrDb(const Waveform& target, const Waveform& reference) {
  const double et = Energy(target);
  const double er = Energy(reference);
  if (et <= 0.0 || er <= 0.0) {
    throw Error(ErrorCode::kDegenerate, "relative snr: zero-energy input");
  }
  return 10.0 * std::log10(er / et);
}

Waveform RescaleToRelativeSnr(const Waveform& target, const Waveform& reference,
                              double snr_db) {
  const double et = Energy(target);
  const double er = Energy(reference);
  if (et <= 0.0 || er <= 0.0) {
    throw Error(ErrorCode::kDegenerate, "rescale_to_relative_snr: zero-energy input");
  }
  const double desired = er * std::pow(10.0, -snr_db / 10.0);
  return Scale(target, std::sqrt(desired / et));
}

Waveform Add(const Waveform& a, const Waveform& b) {
  CheckSameRate(a, b, "add");
  CheckSameLength(a, b, "add");
  Waveform out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] += b.samples[i];
  return out;
}

Waveform Subtract(const Waveform& a, const Waveform& b) {
  CheckSameRate(a, b, "subtract");
  CheckSameLength(a, b, "subtract");
  Waveform out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] -= b.samples[i];
  return out;
}

Waveform Scale(const Waveform& a, double gain) {
  Waveform out = a;
  for (double& v : out.samples) v *= gain;
  return out;
}

Waveform Resized(const Waveform& a, std::size_t n) {
  Waveform out = a;
  out.samples.resize(n, 0.0);
  return out;
}

}  // namespace a2t
