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


#ifndef A2T_CONTOUR_H_
#define A2T_CONTOUR_H_

#include <string_view>
#include <vector>

#include "a2t/metrics.h"
#include "a2t/waveform.h"

namespace a2t {

enum class ContourLabel { kDirectPath, kRescaledTarget, kReflectedReverb, kCustom };

std::string_view ContourLabelName(ContourLabel label);

struct ContourPoint {
  Waveform estimate;
  ContourLabel label = ContourLabel::kCustom;
  // SNR (hyperball sets) or SI-SDR (cone sets) against the reverberant target.
  MetricValue metric_value = MetricValue::Finite(0.0, MetricKind::kSnr);
  MetricValue tsnr = MetricValue::Finite(0.0, MetricKind::kTsnr);
  MetricValue tsi_sdr = MetricValue::Finite(0.0, MetricKind::kTsiSdr);

  // TSNR for hyperball sets, TSI-SDR for cone sets.
  const MetricValue& direct_quality() const {
    return metric_value.kind() == MetricKind::kSnr ? tsnr : tsi_sdr;
  }
};

struct ContourSet {
  Waveform target;  // direct + late
  std::vector<ContourPoint> points;
  // False when <direct, late> < 0, where the SNR exemplars may not follow the
  // direct-path > rescaled > reflected preference order.
  bool ordering_guaranteed = true;
};

// Three estimates at error norm |late| from target = direct + late: the direct
// path, the target rescaled by s = 1 - |late| / |target|, and direct + 2 late.
ContourSet SnrContourPoints(const Waveform& direct, const Waveform& late);

// `count` estimates of norm |direct| at the angle between target and direct. The
// first is the direction of `direct`, the second its reflection about the
// target axis within span{target, direct}; any further points rotate around
// the axis into deterministic orthogonal directions.
ContourSet SiSdrContourPoints(const Waveform& direct, const Waveform& late, int count);

}  // namespace a2t

#endif  // A2T_CONTOUR_H_
