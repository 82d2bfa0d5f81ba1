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

#include <gtest/gtest.h>

#include "a2t/error.h"
#include "test_util.h"

namespace a2t {
namespace {

using testing::NaiveConvolve;
using testing::RandomWaveform;

TEST(WaveformTest, DotAndEnergy) {
  const Waveform a({1.0, 2.0, 3.0}, 16000);
  const Waveform b({4.0, -5.0, 6.0}, 16000);
  EXPECT_DOUBLE_EQ(Dot(a, b), 12.0);
  EXPECT_DOUBLE_EQ(Energy(a), 14.0);
}

TEST(WaveformTest, DotRejectsMismatch) {
  const Waveform a({1.0, 2.0}, 16000);
  try {
    Dot(a, Waveform({1.0}, 16000));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimension);
  }
  try {
    Dot(a, Waveform({1.0, 2.0}, 8000));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRate);
  }
}

TEST(WaveformTest, ConvolveWithImpulseIsIdentity) {
  Rng rng(3);
  const Waveform x = RandomWaveform(rng, 100);
  const Waveform y = ConvolveFull(x, Waveform({1.0}, 16000));
  EXPECT_EQ(y, x);
}

TEST(WaveformTest, ConvolveMatchesNaiveForShortAndLongFilters) {
  Rng rng(5);
  for (std::size_t taps : {1u, 7u, 511u, 512u, 2000u}) {
    const Waveform x = RandomWaveform(rng, 3000);
    const Waveform h = RandomWaveform(rng, taps);
    const Waveform y = ConvolveFull(x, h);
    const std::vector<double> ref = NaiveConvolve(x.samples, h.samples);
    ASSERT_EQ(y.size(), ref.size());
    double scale = 0.0;
    for (double v : ref) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < ref.size(); ++i) {
      ASSERT_NEAR(y[i], ref[i], 1e-10 * scale) << "taps=" << taps << " i=" << i;
    }
  }
}

TEST(WaveformTest, ConvolveIsCommutative) {
  Rng rng(9);
  const Waveform a = RandomWaveform(rng, 40);
  const Waveform b = RandomWaveform(rng, 700);
  const Waveform ab = ConvolveFull(a, b);
  const Waveform ba = ConvolveFull(b, a);
  for (std::size_t i = 0; i < ab.size(); ++i) EXPECT_NEAR(ab[i], ba[i], 1e-10);
}

TEST(WaveformTest, ConvolveRejectsEmptyAndRateMismatch) {
  EXPECT_THROW(ConvolveFull(Waveform({}, 16000), Waveform({1.0}, 16000)), Error);
  EXPECT_THROW(ConvolveFull(Waveform({1.0}, 8000), Waveform({1.0}, 16000)), Error);
}

TEST(WaveformTest, ShiftPlacesAndValidates) {
  const Waveform a({1.0, 2.0}, 16000);
  const Waveform s = Shift(a, 3, 6);
  EXPECT_EQ(s.samples, (std::vector<double>{0, 0, 0, 1, 2, 0}));
  try {
    Shift(a, 5, 6);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPlacement);
  }
  EXPECT_THROW(Shift(a, -1, 6), Error);
}

TEST(WaveformTest, RescaleHitsRequestedSnr) {
  Rng rng(11);
  for (double snr : {-5.0, 0.0, 2.5, 20.0}) {
    const Waveform t = RandomWaveform(rng, 500);
    const Waveform r = RandomWaveform(rng, 300);
    const Waveform scaled = RescaleToRelativeSnr(t, r, snr);
    EXPECT_NEAR(RelativeSnrDb(scaled, r), snr, 1e-9);
  }
}

TEST(WaveformTest, RescaleOfSilenceIsDegenerate) {
  try {
    RescaleToRelativeSnr(Waveform::Zeros(4, 16000), Waveform({1.0}, 16000), 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerate);
    EXPECT_TRUE(e.is_numerical());
  }
}

TEST(WaveformTest, ArithmeticHelpers) {
  const Waveform a({1.0, 2.0}, 16000);
  const Waveform b({0.5, -1.0}, 16000);
  EXPECT_EQ(Add(a, b).samples, (std::vector<double>{1.5, 1.0}));
  EXPECT_EQ(Subtract(a, b).samples, (std::vector<double>{0.5, 3.0}));
  EXPECT_EQ(Scale(a, 2.0).samples, (std::vector<double>{2.0, 4.0}));
  EXPECT_EQ(Resized(a, 3).samples, (std::vector<double>{1.0, 2.0, 0.0}));
  EXPECT_EQ(Resized(a, 1).samples, (std::vector<double>{1.0}));
  EXPECT_THROW(Add(a, Waveform({1.0}, 16000)), Error);
}

}  // namespace
}  // namespace a2t
