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
#include <png.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>

#include "nightforge/colorspace.hpp"
#include "nightforge/frame_io.hpp"
#include "support.hpp"

namespace nf = nightforge;

namespace {

nf::RawFrame small_frame(int rows, int cols, std::uint32_t seed) {
  nf::RawFrame f;
  f.rows = rows;
  f.cols = cols;
  f.meta = nftest::identity_metadata();
  f.meta.black_level = 512;
  f.meta.white_level = 16383;
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> u(0, 16383);
  f.pixels.resize(static_cast<std::size_t>(rows) * cols);
  for (auto& v : f.pixels) v = static_cast<std::uint16_t>(u(rng));
  return f;
}

void write_png8(const std::filesystem::path& path, int rows, int cols) {
  FILE* fp = std::fopen(path.c_str(), "wb");
  ASSERT_NE(fp, nullptr);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  png_init_io(png, fp);
  png_set_IHDR(png, info, cols, rows, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_byte> row(cols, 100);
  for (int r = 0; r < rows; ++r) png_write_row(png, row.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

void write_text(const std::filesystem::path& path, const std::string& text) { std::ofstream(path) << text; }

std::multiset<float> values(const nf::ImagePlanar& img) { return {img.data().begin(), img.data().end()}; }

}  // namespace

TEST(FrameIo, Png16RoundTripIsExact) {
  nftest::TempDir dir;
  const auto f = small_frame(6, 10, 3);
  nf::save_raw(f, dir / "a.png", dir / "a.json");
  const auto g = nf::load_raw(dir / "a.png", dir / "a.json");
  EXPECT_EQ(g.rows, 6);
  EXPECT_EQ(g.cols, 10);
  EXPECT_EQ(g.pixels, f.pixels);
  EXPECT_EQ(g.meta.black_level, 512);
  EXPECT_EQ(g.meta.noise_profile, f.meta.noise_profile);
}

TEST(FrameIo, CountsAboveWhiteAreClipped) {
  nftest::TempDir dir;
  auto f = small_frame(2, 2, 1);
  f.pixels = {100, 16383, 20000, 65535};
  f.meta.validate();
  nf::write_png16(dir / "a.png", 2, 2, f.pixels);
  nf::write_metadata(dir / "a.json", f.meta);
  const auto g = nf::load_raw(dir / "a.png", dir / "a.json");
  EXPECT_EQ(g.pixels, (std::vector<std::uint16_t>{100, 16383, 16383, 16383}));
}

TEST(FrameIo, AllBlackFrameNormalizesToZero) {
  auto f = small_frame(4, 4, 1);
  std::fill(f.pixels.begin(), f.pixels.end(), static_cast<std::uint16_t>(f.meta.black_level));
  const auto norm = nf::normalize_raw(f);
  for (float v : norm.data()) EXPECT_EQ(v, 0.0f);
}

TEST(FrameIo, MissingFiles) {
  nftest::TempDir dir;
  const auto f = small_frame(4, 4, 1);
  nf::save_raw(f, dir / "a.png", dir / "a.json");
  EXPECT_ERRC(nf::load_raw(dir / "nope.png", dir / "a.json"), nf::Errc::kFileNotFound);
  EXPECT_ERRC(nf::load_raw(dir / "a.png", dir / "nope.json"), nf::Errc::kFileNotFound);
}

TEST(FrameIo, MalformedPng) {
  nftest::TempDir dir;
  nf::write_metadata(dir / "a.json", nftest::identity_metadata());
  write_png8(dir / "eight.png", 4, 4);
  EXPECT_ERRC(nf::load_raw(dir / "eight.png", dir / "a.json"), nf::Errc::kMalformedPng);
  write_text(dir / "junk.png", "definitely not a png");
  EXPECT_ERRC(nf::load_raw(dir / "junk.png", dir / "a.json"), nf::Errc::kMalformedPng);
  nf::write_png16(dir / "odd.png", 3, 4, std::vector<std::uint16_t>(12, 7));
  EXPECT_ERRC(nf::load_raw(dir / "odd.png", dir / "a.json"), nf::Errc::kMalformedPng);
}

TEST(FrameIo, MalformedMetadata) {
  nftest::TempDir dir;
  nf::write_png16(dir / "a.png", 4, 4, std::vector<std::uint16_t>(16, 7));
  auto doc = nf::to_json(nftest::identity_metadata());

  auto expect_bad = [&](const nlohmann::json& d) {
    write_text(dir / "m.json", d.dump());
    EXPECT_ERRC(nf::load_raw(dir / "a.png", dir / "m.json"), nf::Errc::kMalformedMetadata);
  };
  auto d = doc;
  d["white_level"] = 0;
  expect_bad(d);
  d = doc;
  d["black_level"] = 65535;
  expect_bad(d);
  d = doc;
  d.erase("noise_profile");
  expect_bad(d);
  d = doc;
  d["cfa_pattern"] = {0, 0, 1, 2};
  expect_bad(d);
  d = doc;
  d["orientation"] = 45;
  expect_bad(d);
  d = doc;
  d["color_matrix_1"] = {1, 2, 3, 2, 4, 6, 0, 0, 1};
  expect_bad(d);
  d = doc;
  d["black_level"] = "low";
  expect_bad(d);
  write_text(dir / "m.json", "{ not json");
  EXPECT_ERRC(nf::load_raw(dir / "a.png", dir / "m.json"), nf::Errc::kMalformedMetadata);
}

TEST(FrameIo, MetadataRoundTripAndConverter) {
  nftest::TempDir dir;
  auto meta = nftest::identity_metadata();
  meta.orientation = nf::Orientation::kPortrait90CCW;
  meta.cfa_pattern = {2, 1, 1, 0};
  meta.noise_profile = {0.01, 0.02, 0.03};
  nf::write_metadata(dir / "m.json", meta);
  const auto back = nf::read_metadata(dir / "m.json");
  EXPECT_EQ(back.orientation, meta.orientation);
  EXPECT_EQ(back.cfa_pattern, meta.cfa_pattern);
  EXPECT_EQ(back.noise_profile, meta.noise_profile);
  EXPECT_EQ(nf::orientation_from_degrees(270), nf::Orientation::kPortrait90CCW);

  write_text(dir / "foreign.json", R"({"BlackLevel": 10, "WhiteLevel": 1000})");
  const nf::MetadataConverter conv = [](const nlohmann::json& j) {
    auto out = nf::to_json(nftest::identity_metadata());
    out["black_level"] = j.at("BlackLevel");
    out["white_level"] = j.at("WhiteLevel");
    return out;
  };
  const auto m = nf::read_metadata(dir / "foreign.json", conv);
  EXPECT_EQ(m.black_level, 10);
  EXPECT_EQ(m.white_level, 1000);
}

TEST(Jpeg, FlatGrayRoundTrip) {
  nftest::TempDir dir;
  const nf::ImagePlanar gray(24, 40, 3, nf::ColorSpace::kEncodedSRGB, 0.5f);
  nf::save_jpeg(gray, dir / "g.jpg", 100);
  const auto back = nf::load_jpeg(dir / "g.jpg");
  EXPECT_EQ(back.rows(), 24);
  EXPECT_EQ(back.cols(), 40);
  EXPECT_EQ(back.channels(), 3);
  for (float v : back.data()) EXPECT_NEAR(v, 128.0f / 255.0f, 1.0f / 255.0f + 1e-6f);
}

TEST(Jpeg, GrayscaleAndErrors) {
  nftest::TempDir dir;
  nf::save_jpeg(nf::make_plane(9, 7, 0.2f), dir / "l.jpg", 90);
  EXPECT_EQ(nf::load_jpeg(dir / "l.jpg").channels(), 1);
  EXPECT_ERRC(nf::save_jpeg(nf::make_plane(4, 4), dir / "missing_dir" / "x.jpg"), nf::Errc::kIoError);
  EXPECT_ERRC(nf::save_jpeg(nf::make_plane(4, 4), dir / "q.jpg", 0), nf::Errc::kInvalidArgument);
  EXPECT_ERRC(nf::save_jpeg(nftest::random_image(4, 4, 2, 1), dir / "c.jpg"), nf::Errc::kInvalidArgument);
  EXPECT_ERRC(nf::load_jpeg(dir / "none.jpg"), nf::Errc::kFileNotFound);
}

TEST(Resize, IdentityAtOutputSize) {
  const auto img = nftest::random_image(866, 1300, 3, 9);
  const auto out = nf::resize_to_output(img, nftest::identity_metadata(), {});
  EXPECT_LT(nftest::max_abs_diff(out, img), 1e-6);
}

TEST(Resize, BicubicInterpolatesLinearRamps) {
  nf::ImagePlanar ramp(20, 30, 1, nf::ColorSpace::kLuma);
  for (int r = 0; r < 20; ++r)
    for (int c = 0; c < 30; ++c) ramp(r, c) = 0.01f * c + 0.02f * r;
  const auto out = nf::resize(ramp, 40, 60);
  // Interior samples of a linear ramp are reproduced exactly by Keys' kernel.
  for (int r = 4; r < 36; ++r)
    for (int c = 4; c < 56; ++c) {
      const double sx = (c + 0.5) * 0.5 - 0.5, sy = (r + 0.5) * 0.5 - 0.5;
      EXPECT_NEAR(out(r, c), 0.01 * sx + 0.02 * sy, 1e-5);
    }
}

TEST(Resize, OutputDimensions) {
  const nf::OutputSpec spec;
  auto meta = nftest::identity_metadata();
  EXPECT_EQ(nf::output_dims_before_orientation(3646, 5202, meta.orientation, spec), (nf::Size2{1300, 866}));
  EXPECT_EQ(nf::output_dims_before_orientation(5202, 3646, meta.orientation, spec), (nf::Size2{866, 1300}));
  // Rotated afterwards, so the portrait target is resized in sensor layout.
  EXPECT_EQ(nf::output_dims_before_orientation(3646, 5202, nf::Orientation::kPortrait90CW, spec),
            (nf::Size2{1300, 866}));

  meta.orientation = nf::Orientation::kPortrait90CW;
  const auto img = nftest::random_image(60, 90, 3, 2);
  const auto out = nf::apply_orientation(nf::resize_to_output(img, meta, spec), meta.orientation);
  EXPECT_EQ(out.cols(), 866);
  EXPECT_EQ(out.rows(), 1300);
}

TEST(Resize, AlwaysOneOfTwoSizes) {
  std::mt19937 rng(4);
  std::uniform_int_distribution<int> dim(2, 6000);
  const nf::OutputSpec spec;
  for (int i = 0; i < 500; ++i) {
    for (auto o : {nf::Orientation::kLandscape0, nf::Orientation::kPortrait90CW, nf::Orientation::kRotate180}) {
      const auto d = nf::output_dims_before_orientation(dim(rng), dim(rng), o, spec);
      const nf::Size2 upright = nf::swaps_axes(o) ? nf::Size2{d.height, d.width} : d;
      EXPECT_TRUE(upright == spec.landscape_size || upright == spec.portrait_size);
    }
  }
}

TEST(Resize, Errors) {
  EXPECT_ERRC(nf::resize(nf::make_plane(4, 4), 0, 3), nf::Errc::kBadDims);
  EXPECT_ERRC(nf::resize_to_output(nf::make_plane(1, 4), nftest::identity_metadata(), {}), nf::Errc::kBadDims);
}

TEST(Orientation, BruteForceClockwiseMap) {
  nf::ImagePlanar img(2, 3, 1, nf::ColorSpace::kLuma);
  for (int i = 0; i < 6; ++i) img.data()[i] = static_cast<float>(i);
  // 0 1 2        3 0
  // 3 4 5   ->   4 1
  //              5 2
  const auto cw = nf::apply_orientation(img, nf::Orientation::kPortrait90CW);
  ASSERT_EQ(cw.rows(), 3);
  ASSERT_EQ(cw.cols(), 2);
  EXPECT_EQ(std::vector<float>(cw.data().begin(), cw.data().end()), (std::vector<float>{3, 0, 4, 1, 5, 2}));
  const auto ccw = nf::apply_orientation(img, nf::Orientation::kPortrait90CCW);
  EXPECT_EQ(std::vector<float>(ccw.data().begin(), ccw.data().end()), (std::vector<float>{2, 5, 1, 4, 0, 3}));
}

TEST(Orientation, InversesAndMultiset) {
  const auto img = nftest::random_image(5, 8, 3, 6);
  EXPECT_TRUE(nf::apply_orientation(img, nf::Orientation::kLandscape0) == img);
  const auto r180 = nf::apply_orientation(img, nf::Orientation::kRotate180);
  EXPECT_TRUE(nf::apply_orientation(r180, nf::Orientation::kRotate180) == img);
  for (auto o : {nf::Orientation::kPortrait90CW, nf::Orientation::kPortrait90CCW, nf::Orientation::kRotate180}) {
    const auto out = nf::apply_orientation(img, o);
    EXPECT_TRUE(nf::apply_orientation(out, nf::inverse(o)) == img);
    EXPECT_EQ(values(out), values(img));
  }
  const auto cw = nf::apply_orientation(img, nf::Orientation::kPortrait90CW);
  EXPECT_TRUE(nf::apply_orientation(cw, nf::Orientation::kPortrait90CW) == r180);
}
