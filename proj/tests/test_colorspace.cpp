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
#include <random>

#include "nightforge/colorspace.hpp"
#include "support.hpp"

namespace nf = nightforge;

namespace {

nf::RawFrame frame_with(std::vector<std::uint16_t> px, int rows, int cols, double black, double white) {
  nf::RawFrame f;
  f.rows = rows;
  f.cols = cols;
  f.pixels = std::move(px);
  f.meta = nftest::identity_metadata();
  f.meta.black_level = black;
  f.meta.white_level = white;
  return f;
}

nf::ImagePlanar pixel(double r, double g, double b) {
  nf::ImagePlanar img(1, 1, 3, nf::ColorSpace::kLinearSRGB);
  img(0, 0, 0) = static_cast<float>(r);
  img(0, 0, 1) = static_cast<float>(g);
  img(0, 0, 2) = static_cast<float>(b);
  return img;
}

}  // namespace

TEST(NormalizeRaw, LevelsMapToUnitRange) {
  const auto f = frame_with({64, 1087, 575, 0}, 2, 2, 64, 1087);
  const auto out = nf::normalize_raw(f);
  EXPECT_EQ(out.space(), nf::ColorSpace::kMosaic);
  EXPECT_FLOAT_EQ(out(0, 0), 0.0f);
  EXPECT_FLOAT_EQ(out(0, 1), 1.0f);
  EXPECT_NEAR(out(1, 0), (575.0 - 64.0) / 1023.0, 1e-7);
  EXPECT_NEAR(out(1, 0), 0.49951, 1e-5);
  EXPECT_FLOAT_EQ(out(1, 1), 0.0f);  // below black clamps to 0
}

TEST(NormalizeRaw, MonotoneInCount) {
  std::vector<std::uint16_t> px(1024);
  for (int i = 0; i < 1024; ++i) px[i] = static_cast<std::uint16_t>(i * 16);
  const auto out = nf::normalize_raw(frame_with(px, 32, 32, 512, 15000));
  for (std::size_t i = 1; i < px.size(); ++i) EXPECT_LE(out.data()[i - 1], out.data()[i]);
}

TEST(CameraToSrgb, IdentityMatrixKeepsWhite) {
  const auto meta = nftest::identity_metadata();
  const auto out = nf::camera_to_srgb(pixel(1, 1, 1), meta);
  for (int ch = 0; ch < 3; ++ch) EXPECT_NEAR(out(0, 0, ch), 1.0f, 1e-6);
  EXPECT_EQ(out.space(), nf::ColorSpace::kLinearSRGB);
}

TEST(CameraToSrgb, WhitePreservedForAnyMatrix) {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (int trial = 0; trial < 50; ++trial) {
    nf::FrameMetadata meta = nftest::identity_metadata();
    for (int i = 0; i < 9; ++i) meta.color_matrix_1.m[i] += u(rng);
    if (std::abs(meta.color_matrix_1.determinant()) < 0.1) continue;
    nf::Mat3 m;
    try {
      m = nf::camera_to_srgb_matrix(meta);
    } catch (const nf::Error&) {
      continue;  // a composite row summing to zero cannot be normalized
    }
    const nf::Vec3 w = m * nf::Vec3{1, 1, 1};
    for (double v : w) EXPECT_NEAR(v, 1.0, 1e-12);
  }
}

TEST(CameraToSrgb, XyzOfRedLandsOnRedAxis) {
  // With color_matrix_1 = I the camera is XYZ. sRGB red in XYZ is the first
  // column of the sRGB -> XYZ matrix; after the standard matrix it is exactly
  // (1, 0, 0). The row normalization then scales each channel by 1/rowsum.
  const nf::Vec3 red_xyz{0.4124564, 0.2126729, 0.0193339};
  const auto meta = nftest::identity_metadata();
  const auto out = nf::camera_to_srgb(pixel(red_xyz[0], red_xyz[1], red_xyz[2]), meta);
  const nf::Mat3& s = nf::kXyzToSrgbD65;
  const double row0 = s(0, 0) + s(0, 1) + s(0, 2);
  EXPECT_NEAR(out(0, 0, 0), 1.0 / row0, 1e-5);
  EXPECT_NEAR(out(0, 0, 1), 0.0, 1e-5);
  EXPECT_NEAR(out(0, 0, 2), 0.0, 1e-5);
}

TEST(CameraToSrgb, SingularMatrixRejected) {
  auto meta = nftest::identity_metadata();
  meta.color_matrix_1 = nf::Mat3{{1, 2, 3, 2, 4, 6, 0, 0, 1}};
  EXPECT_ERRC(nf::camera_to_srgb(pixel(0.5, 0.5, 0.5), meta), nf::Errc::kSingularMatrix);
}

TEST(CameraToSrgb, OutputClamped) {
  const auto meta = nftest::identity_metadata();
  const auto out = nf::camera_to_srgb(nftest::random_image(16, 16, 3, 2), meta);
  for (float v : out.data()) {
    EXPECT_GE(v, 0.0f);
    EXPECT_LE(v, 1.0f);
  }
}

TEST(YCbCr, GrayIsAchromatic) {
  for (double g : {0.0, 0.13, 0.5, 0.87, 1.0}) {
    const auto v = nf::rgb_to_ycbcr(g, g, g);
    EXPECT_NEAR(v.y, g, 1e-15);
    EXPECT_NEAR(v.cb, 0.5, 1e-15);
    EXPECT_NEAR(v.cr, 0.5, 1e-15);
  }
}

TEST(YCbCr, PureRed) {
  const auto v = nf::rgb_to_ycbcr(1, 0, 0);
  EXPECT_NEAR(v.y, 0.299, 1e-15);
  EXPECT_GT(v.cr, 0.5);
  EXPECT_NEAR(v.cr, 0.5 + 0.701 / 1.402, 1e-12);  // = 1.0
  EXPECT_NEAR(v.cb, 0.5 - 0.299 / 1.772, 1e-12);
}

TEST(YCbCr, RoundTrip) {
  const auto img = nftest::random_image(37, 23, 3, 9);
  const auto ycc = nf::rgb_to_ycbcr(img);
  EXPECT_EQ(ycc.space(), nf::ColorSpace::kYCbCr);
  for (float v : ycc.data()) {
    EXPECT_GE(v, -1e-6f);
    EXPECT_LE(v, 1.0f + 1e-6f);
  }
  const auto back = nf::ycbcr_to_rgb(ycc);
  EXPECT_LT(nftest::max_abs_diff(img, back), 1e-6);
}

TEST(YCbCr, LumaMatchesYPlane) {
  const auto img = nftest::random_image(5, 6, 3, 1);
  const auto y = nf::luma(img);
  const auto ycc = nf::rgb_to_ycbcr(img);
  for (std::size_t i = 0; i < y.pixel_count(); ++i) EXPECT_EQ(y.data()[i], ycc.plane(0)[i]);
}

TEST(HsvValue, IsChannelMax) {
  EXPECT_FLOAT_EQ(nf::rgb_to_hsv_value(pixel(0.2, 0.5, 0.3))(0, 0), 0.5f);
  EXPECT_FLOAT_EQ(nf::rgb_to_hsv_value(pixel(0, 0, 0))(0, 0), 0.0f);
  EXPECT_FLOAT_EQ(nf::rgb_to_hsv_value(pixel(1, 1, 1))(0, 0), 1.0f);
  // Achromatic pixels: V equals Y exactly.
  const auto g = pixel(0.4, 0.4, 0.4);
  EXPECT_FLOAT_EQ(nf::rgb_to_hsv_value(g)(0, 0), nf::luma(g)(0, 0));
}

TEST(Gamma, Examples) {
  const auto img = pixel(0.25, 1.0, 0.0);
  const auto same = nf::gamma_encode(img, 1.0);
  EXPECT_TRUE(same == img);
  const auto enc = nf::gamma_encode(img, 1.0 / 1.4);
  EXPECT_NEAR(enc(0, 0, 0), std::pow(0.25, 1.0 / 1.4), 1e-7);
  EXPECT_NEAR(enc(0, 0, 0), 0.3715, 1e-4);
  EXPECT_FLOAT_EQ(enc(0, 0, 1), 1.0f);
  EXPECT_FLOAT_EQ(enc(0, 0, 2), 0.0f);
  EXPECT_FLOAT_EQ(nf::gamma_encode(img, 3.7)(0, 0, 1), 1.0f);
}

TEST(Gamma, OrderAgainstIdentity) {
  const auto img = nftest::random_image(20, 20, 3, 12);
  const auto lo = nf::gamma_encode(img, 0.6);
  const auto hi = nf::gamma_encode(img, 1.8);
  for (std::size_t i = 0; i < img.data().size(); ++i) {
    EXPECT_GE(lo.data()[i], img.data()[i]);
    EXPECT_LE(hi.data()[i], img.data()[i]);
  }
}

TEST(Gamma, NonPositiveExponentRejected) {
  const auto img = pixel(0.5, 0.5, 0.5);
  EXPECT_ERRC(nf::gamma_encode(img, 0.0), nf::Errc::kInvalidGamma);
  EXPECT_ERRC(nf::gamma_encode(img, -1.0), nf::Errc::kInvalidGamma);
}

TEST(Quantize, RoundsToEightBitLevels) {
  const auto img = nftest::random_image(10, 10, 3, 8);
  const auto q = nf::quantize_8bit(img);
  for (std::size_t i = 0; i < img.data().size(); ++i) {
    const double levels = q.data()[i] * 255.0;
    EXPECT_NEAR(levels, std::round(levels), 1e-4);
    EXPECT_LE(std::abs(q.data()[i] - img.data()[i]), 0.5 / 255.0 + 1e-7);
  }
  const auto twice = nf::quantize_8bit(q);
  EXPECT_TRUE(twice == q);
}
