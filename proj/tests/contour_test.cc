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

#include <gtest/gtest.h>

#include <cmath>

#include "a2t/error.h"
#include "test_util.h"

namespace a2t {
namespace {

using testing::RandomWaveform;

TEST(ContourTest, SnrExemplarsShareOneSnr) {
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    const Waveform d = RandomWaveform(rng, 64);
    const Waveform r = Scale(RandomWaveform(rng, 64), 0.5);
    const ContourSet set = SnrContourPoints(d, r);
    ASSERT_EQ(set.points.size(), 3u);
    const double v = set.points[0].metric_value.db();
    for (const ContourPoint& p : set.points) EXPECT_NEAR(p.metric_value.db(), v, 1e-9);
    EXPECT_EQ(set.points[0].label, ContourLabel::kDirectPath);
    EXPECT_EQ(set.points[1].label, ContourLabel::kRescaledTarget);
    EXPECT_EQ(set.points[2].label, ContourLabel::kReflectedReverb);
    EXPECT_TRUE(set.points[0].tsnr.is_positive_infinity());
    EXPECT_EQ(set.ordering_guaranteed, Dot(d, r) >= 0.0);
    if (set.ordering_guaranteed) {
      EXPECT_GT(set.points[1].tsnr.db(), set.points[2].tsnr.db());
    }
  }
}

TEST(ContourTest, SnrContourNeedsReverb) {
  const Waveform d({1.0, 2.0}, 16000);
  try {
    SnrContourPoints(d, Waveform::Zeros(2, 16000));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerate);
  }
}

TEST(ContourTest, ConePointsShareOneSiSdr) {
  Rng rng(2);
  for (int i = 0; i < 30; ++i) {
    const Waveform d = RandomWaveform(rng, 64);
    const Waveform r = Scale(RandomWaveform(rng, 64), 0.7);
    const ContourSet set = SiSdrContourPoints(d, r, 8);
    ASSERT_EQ(set.points.size(), 8u);
    const double v = set.points[0].metric_value.db();
    for (const ContourPoint& p : set.points) {
      EXPECT_NEAR(p.metric_value.db(), v, 1e-9);
      EXPECT_NEAR(Energy(p.estimate), Energy(d), 1e-9 * Energy(d));
      for (double g : {0.1, 1.0, 7.0}) {
        EXPECT_NEAR(SiSdr(Scale(p.estimate, g), set.target).db(), v, 1e-9);
      }
    }
    EXPECT_TRUE(set.points[0].tsi_sdr.is_positive_infinity());
    // Every other point carries direct-path distortion.
    for (std::size_t p = 1; p < set.points.size(); ++p) {
      EXPECT_TRUE(set.points[p].tsi_sdr.is_finite());
    }
  }
}

TEST(ContourTest, ConeValidation) {
  Rng rng(3);
  const Waveform d = RandomWaveform(rng, 16);
  EXPECT_THROW(SiSdrContourPoints(d, RandomWaveform(rng, 16), 1), Error);
  // A late part parallel to the direct path leaves no angle to rotate.
  EXPECT_THROW(SiSdrContourPoints(d, Scale(d, 0.5), 3), Error);
  const Waveform tiny_d({1.0, 0.0}, 16000), tiny_r({0.0, 1.0}, 16000);
  EXPECT_EQ(SiSdrContourPoints(tiny_d, tiny_r, 2).points.size(), 2u);
  EXPECT_THROW(SiSdrContourPoints(tiny_d, tiny_r, 3), Error);
}

}  // namespace
}  // namespace a2t
