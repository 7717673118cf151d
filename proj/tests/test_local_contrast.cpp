/*
 * Copyright 2026 The Nightforge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "nightforge/local_contrast.hpp"
#include "support.hpp"

namespace nf = nightforge;

TEST(ComputeGamma, Examples) {
  EXPECT_DOUBLE_EQ(nf::compute_gamma(0.5), 1.0);
  EXPECT_NEAR(nf::compute_gamma(0.25), 2.0, 1e-15);
  EXPECT_NEAR(nf::compute_gamma(std::pow(2.0, -0.5)), 2.0, 1e-14);
}

TEST(ComputeGamma, ContinuousAtHalf) {
  EXPECT_NEAR(nf::compute_gamma(0.5 - 1e-9), 1.0, 1e-8);
  EXPECT_NEAR(nf::compute_gamma(0.5 + 1e-9), 1.0, 1e-8);
}

TEST(ComputeGamma, AboveOneForAnyMeanAwayFromHalf) {
  for (double m = 0.01; m < 0.99; m += 0.01) {
    if (std::abs(m - 0.5) < 1e-9) continue;
    EXPECT_GT(nf::compute_gamma(m), 1.0) << m;
  }
}

TEST(ComputeGamma, OutOfRangeMeanRejected) {
  for (double m : {0.0, 1.0, -0.1, 1.5, std::nan("")}) EXPECT_ERRC(nf::compute_gamma(m), nf::Errc::kInvalidMean);
}

TEST(LccPixel, Examples) {
  EXPECT_NEAR(nf::lcc_pixel(0.25, 0.0, 2.0), 0.5, 1e-15);
  for (double y : {0.0, 0.1, 0.5, 0.9, 1.0}) EXPECT_NEAR(nf::lcc_pixel(y, 0.5, 3.0), y, 1e-15);
  for (double m : {0.0, 0.3, 1.0}) {
    EXPECT_DOUBLE_EQ(nf::lcc_pixel(1.0, m, 2.5), 1.0);
    EXPECT_DOUBLE_EQ(nf::lcc_pixel(0.0, m, 2.5), 0.0);
  }
}

TEST(LccApply, MonotoneInY) {
  for (double m : {0.0, 0.2, 0.5, 0.8, 1.0})
    for (double g : {0.5, 1.0, 2.0, 4.0}) {
      double prev = -1.0;
      for (int i = 0; i <= 1000; ++i) {
        const double v = nf::lcc_pixel(i / 1000.0, m, g);
        EXPECT_GE(v, prev);
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
        prev = v;
      }
    }
}

TEST(LccApply, DarkSceneBrightensShadowsAndDarkensHighlights) {
  const auto y = nftest::random_image(32, 32, 1, 3, 0.0f, 1.0f, nf::ColorSpace::kLuma);
  const auto mask = nftest::random_image(32, 32, 1, 4, 0.0f, 1.0f, nf::ColorSpace::kLuma);
  const double gamma = nf::compute_gamma(0.2);
  const auto out = nf::lcc_apply(y, mask, gamma);
  for (std::size_t i = 0; i < y.pixel_count(); ++i) {
    if (mask.data()[i] < 0.5f) {
      EXPECT_GE(out.data()[i], y.data()[i]);
    }
    if (mask.data()[i] > 0.5f) {
      EXPECT_LE(out.data()[i], y.data()[i]);
    }
  }
}

TEST(LccApply, HalfMaskIsIdentity) {
  const auto y = nftest::random_image(9, 11, 1, 6, 0.0f, 1.0f, nf::ColorSpace::kLuma);
  const auto out = nf::lcc_apply(y, nf::make_plane(9, 11, 0.5f), 2.7);
  EXPECT_LT(nftest::max_abs_diff(y, out), 1e-7);
}

TEST(LccApply, Errors) {
  const auto y = nf::make_plane(4, 4, 0.3f);
  EXPECT_ERRC(nf::lcc_apply(y, nf::make_plane(4, 5), 2.0), nf::Errc::kDimMismatch);
  EXPECT_ERRC(nf::lcc_apply(y, y, 0.0), nf::Errc::kInvalidArgument);
}

TEST(BuildMask, ConstantPlane) {
  const auto m = nf::build_mask(nf::make_plane(20, 30, 0.61f), 4.0);
  for (float v : m.data()) EXPECT_NEAR(v, 0.61f, 1e-6);
}

TEST(BuildMask, ImpulseSpreadsAndKeepsMass) {
  nf::ImagePlanar y = nf::make_plane(41, 41);
  y(20, 20) = 1.0f;
  const auto m = nf::build_mask(y, 3.0);
  EXPECT_LT(m(20, 20), 1.0f);
  EXPECT_GT(m(20, 23), 0.0f);
  // Discrete Gaussian oracle for the centre value: (k0)^2.
  const auto k = nf::gaussian_half_kernel(3.0);
  EXPECT_NEAR(m(20, 20), k[0] * k[0], 1e-7);
  const double mass = std::accumulate(m.data().begin(), m.data().end(), 0.0);
  EXPECT_NEAR(mass / m.pixel_count(), 1.0 / y.pixel_count(), 1e-4);
}

TEST(BuildMask, SmallSigmaNearIdentityOnSmoothImage) {
  nf::ImagePlanar y = nf::make_plane(32, 32);
  for (int r = 0; r < 32; ++r)
    for (int c = 0; c < 32; ++c) y(r, c) = 0.5f + 0.4f * std::sin(r * 0.2f) * std::cos(c * 0.15f);
  EXPECT_LT(nftest::max_abs_diff(nf::build_mask(y, 0.5), y), 0.05);
  EXPECT_ERRC(nf::build_mask(y, 0.0), nf::Errc::kInvalidArgument);
}

TEST(DefaultMaskSigma, ThirtiethOfShortSide) {
  EXPECT_DOUBLE_EQ(nf::default_mask_sigma(3646, 5202), 3646 / 30.0);
  EXPECT_DOUBLE_EQ(nf::default_mask_sigma(866, 1300), 866 / 30.0);
  EXPECT_DOUBLE_EQ(nf::default_mask_sigma(4, 4), 0.5);
}

TEST(LocalContrastCorrect, ResultFields) {
  const auto y = nftest::random_image(30, 40, 1, 10, 0.0f, 0.4f, nf::ColorSpace::kLuma);
  const auto res = nf::local_contrast_correct(y, 3.0);
  const double mean = std::accumulate(y.data().begin(), y.data().end(), 0.0) / y.pixel_count();
  EXPECT_NEAR(res.mean_y, mean, 1e-9);
  EXPECT_NEAR(res.gamma, std::log(mean) / std::log(0.5), 1e-9);
  EXPECT_TRUE(res.y_in == y);
  EXPECT_TRUE(res.mask.same_dims(y));
  EXPECT_TRUE(res.y_out == nf::lcc_apply(y, res.mask, res.gamma));
}

TEST(LocalContrastCorrect, BlackPlaneClampsMean) {
  const auto res = nf::local_contrast_correct(nf::make_plane(8, 8), 1.0);
  EXPECT_NEAR(res.gamma, std::log(1e-4) / std::log(0.5), 1e-9);
  for (float v : res.y_out.data()) EXPECT_EQ(v, 0.0f);
}
