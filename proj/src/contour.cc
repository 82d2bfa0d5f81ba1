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


#include "a2t/contour.h"

#include <cmath>
#include <numbers>
#include <string>

#include "a2t/error.h"

namespace a2t {
namespace {

ContourPoint MakePoint(Waveform estimate, ContourLabel label, const Waveform& target,
                       const Waveform& direct, MetricKind kind) {
  ContourPoint p;
  p.label = label;
  p.metric_value = kind == MetricKind::kSnr ? Snr(estimate, target)
                                            : SiSdrCosineForm(estimate, target);
  p.tsnr = Tsnr(estimate, direct);
  p.tsi_sdr = TsiSdr(estimate, direct);
  p.estimate = std::move(estimate);
  return p;
}

void CheckInputs(const Waveform& direct, const Waveform& late, const char* what) {
  CheckSameRate(direct, late, what);
  CheckSameLength(direct, late, what);
  if (Energy(late) == 0.0) {
    throw Error(ErrorCode::kDegenerate,
                std::string(what) + ": zero late reverberation gives no contour");
  }
}

// Removes the components along `basis` (orthonormal) and normalizes.
// Returns false when nothing is left.
bool Orthonormalize(std::vector<double>& v, const std::vector<std::vector<double>>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : basis) {
      const double proj = Dot(v, b);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= proj * b[i];
    }
  }
  const double norm = std::sqrt(Energy(v));
  if (norm < 1e-8) return false;
  for (double& x : v) x /= norm;
  return true;
}

}  // namespace

std::string_view ContourLabelName(ContourLabel label) {
  switch (label) {
    case ContourLabel::kDirectPath: return "direct_path";
    case ContourLabel::kRescaledTarget: return "rescaled_target";
    case ContourLabel::kReflectedReverb: return "reflected_reverb";
    case ContourLabel::kCustom: return "custom";
  }
  return "?";
}

ContourSet SnrContourPoints(const Waveform& direct, const Waveform& late) {
  CheckInputs(direct, late, "snr_contour_points");
  ContourSet set;
  set.target = Add(direct, late);
  set.ordering_guaranteed = Dot(direct, late) >= 0.0;
  const double scale =
      1.0 - std::sqrt(Energy(late)) / std::sqrt(Energy(set.target));

  set.points.push_back(
      MakePoint(direct, ContourLabel::kDirectPath, set.target, direct, MetricKind::kSnr));
  set.points.push_back(MakePoint(Scale(set.target, scale), ContourLabel::kRescaledTarget,
                                 set.target, direct, MetricKind::kSnr));
  set.points.push_back(MakePoint(Add(direct, Scale(late, 2.0)),
                                 ContourLabel::kReflectedReverb, set.target, direct,
                                 MetricKind::kSnr));
  return set;
}

ContourSet SiSdrContourPoints(const Waveform& direct, const Waveform& late, int count) {
  CheckInputs(direct, late, "si_sdr_contour_points");
  if (count < 2) {
    throw Error(ErrorCode::kValidation, "si_sdr_contour_points: count must be >= 2");
  }
  ContourSet set;
  set.target = Add(direct, late);
  set.ordering_guaranteed = Dot(direct, late) >= 0.0;
  const std::size_t n = direct.size();
  if (count > 2 && n < 3) {
    throw Error(ErrorCode::kDimension,
                "si_sdr_contour_points: more than two cone points need >= 3 samples");
  }

  std::vector<double> axis = set.target.samples;
  if (!Orthonormalize(axis, {})) {
    throw Error(ErrorCode::kDegenerate, "si_sdr_contour_points: zero target");
  }
  std::vector<double> in_plane = direct.samples;
  const double cosine =
      Dot(direct, set.target) / std::sqrt(Energy(direct) * Energy(set.target));
  if (!Orthonormalize(in_plane, {axis}) || std::abs(cosine) >= 1.0) {
    throw Error(ErrorCode::kDegenerate,
                "si_sdr_contour_points: direct path parallel to target");
  }
  const double theta = std::acos(cosine);
  const double ct = std::cos(theta), st = std::sin(theta);
  const double radius = std::sqrt(Energy(direct));

  std::vector<std::vector<double>> basis = {axis, in_plane};
  std::vector<double> extra;
  if (count > 2) {
    // Deterministic seed direction for the out-of-plane rotations.
    for (std::size_t i = 0; i < n && basis.size() < 3; ++i) {
      std::vector<double> candidate(n, 0.0);
      candidate[i] = 1.0;
      if (Orthonormalize(candidate, basis)) basis.push_back(std::move(candidate));
    }
    if (basis.size() < 3) {
      throw Error(ErrorCode::kDimension, "si_sdr_contour_points: no orthogonal direction");
    }
    extra = basis[2];
  }

  for (int p = 0; p < count; ++p) {
    // Rotation angle around the axis: 0 (direct), pi (reflection), then an
    // even spread over (0, pi) using the extra direction.
    double phi;
    ContourLabel label = ContourLabel::kCustom;
    if (p == 0) {
      phi = 0.0;
      label = ContourLabel::kDirectPath;
    } else if (p == 1) {
      phi = std::numbers::pi;
      label = ContourLabel::kReflectedReverb;
    } else {
      phi = std::numbers::pi * (p - 1) / (count - 1);
    }
    std::vector<double> v(n);
    const double a = st * std::cos(phi), b = st * std::sin(phi);
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = radius * (ct * axis[i] + a * in_plane[i] +
                       (extra.empty() ? 0.0 : b * extra[i]));
    }
    // The direct-path point is x_d itself so its TSI-SDR is exactly +inf.
    if (p == 0) v = direct.samples;
    set.points.push_back(MakePoint(Waveform(std::move(v), direct.sample_rate), label,
                                   set.target, direct, MetricKind::kSiSdr));
  }
  return set;
}

}  // namespace a2t
