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

#pragma once

#include <algorithm>
#include <cmath>

#include "nightforge/error.hpp"
#include "nightforge/image.hpp"
#include "nightforge/metadata.hpp"
#include "nightforge/parallel.hpp"

namespace nightforge {

// Linear XYZ -> sRGB primaries, D65 white.
inline const Mat3 kXyzToSrgbD65{{3.2404542, -1.5371385, -0.4985314,   //
                                 -0.9692660, 1.8760108, 0.0415560,    //
                                 0.0556434, -0.2040259, 1.0572252}};

// BT.601 luma weights.
inline constexpr double kLumaR = 0.299;
inline constexpr double kLumaG = 0.587;
inline constexpr double kLumaB = 0.114;

inline double luma601(double r, double g, double b) { return kLumaR * r + kLumaG * g + kLumaB * b; }

/// Black-level subtraction and white-level scaling of the raw counts.
inline ImagePlanar normalize_raw(const RawFrame& frame) {
  ImagePlanar out(frame.rows, frame.cols, 1, ColorSpace::kMosaic);
  const double black = frame.meta.black_level;
  const double range = frame.meta.white_level - frame.meta.black_level;
  auto dst = out.data();
  parallel_for(0, static_cast<std::size_t>(frame.rows), [&](std::size_t r) {
    const std::size_t base = r * frame.cols;
    for (int c = 0; c < frame.cols; ++c) {
      const double v = (static_cast<double>(frame.pixels[base + c]) - black) / range;
      dst[base + c] = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  });
  return out;
}

/// Applies a 3x3 matrix to every pixel of a 3-channel image.
inline ImagePlanar apply_matrix(const ImagePlanar& img, const Mat3& m, ColorSpace out_space,
                                bool clamp = true) {
  if (img.channels() != 3) fail(Errc::kInvalidArgument, "apply_matrix needs a 3-channel image");
  ImagePlanar out(img.rows(), img.cols(), 3, out_space);
  const auto r = img.plane(0), g = img.plane(1), b = img.plane(2);
  auto ro = out.plane(0), go = out.plane(1), bo = out.plane(2);
  const std::size_t n = img.pixel_count();
  const std::size_t chunk = 1 << 14;
  parallel_for(0, (n + chunk - 1) / chunk, [&](std::size_t t) {
    const std::size_t end = std::min(n, (t + 1) * chunk);
    for (std::size_t i = t * chunk; i < end; ++i) {
      const Vec3 v = m * Vec3{r[i], g[i], b[i]};
      if (clamp) {
        ro[i] = static_cast<float>(std::clamp(v[0], 0.0, 1.0));
        go[i] = static_cast<float>(std::clamp(v[1], 0.0, 1.0));
        bo[i] = static_cast<float>(std::clamp(v[2], 0.0, 1.0));
      } else {
        ro[i] = static_cast<float>(v[0]);
        go[i] = static_cast<float>(v[1]);
        bo[i] = static_cast<float>(v[2]);
      }
    }
  });
  return out;
}

/// Camera RGB -> XYZ -> linear sRGB, with each row of the composite matrix
/// scaled to sum to one so camera white lands on sRGB white.
inline Mat3 camera_to_srgb_matrix(const FrameMetadata& meta) {
  const Mat3 cam_to_xyz = meta.color_matrix_1.inverse();
  Mat3 composite = kXyzToSrgbD65 * cam_to_xyz;
  for (int r = 0; r < 3; ++r) {
    const double sum = composite(r, 0) + composite(r, 1) + composite(r, 2);
    if (!(std::abs(sum) > 1e-12)) fail(Errc::kSingularMatrix, "camera->sRGB row sums to zero");
    for (int c = 0; c < 3; ++c) composite(r, c) /= sum;
  }
  return composite;
}

inline ImagePlanar camera_to_srgb(const ImagePlanar& img, const FrameMetadata& meta) {
  return apply_matrix(img, camera_to_srgb_matrix(meta), ColorSpace::kLinearSRGB);
}

struct YCbCr {
  double y, cb, cr;
};

// Full-range BT.601, chroma centred at 0.5.
inline YCbCr rgb_to_ycbcr(double r, double g, double b) {
  const double y = luma601(r, g, b);
  return {y, 0.5 + (b - y) / 1.772, 0.5 + (r - y) / 1.402};
}

inline Vec3 ycbcr_to_rgb(double y, double cb, double cr) {
  const double r = y + 1.402 * (cr - 0.5);
  const double b = y + 1.772 * (cb - 0.5);
  const double g = (y - kLumaR * r - kLumaB * b) / kLumaG;
  return {r, g, b};
}

inline ImagePlanar rgb_to_ycbcr(const ImagePlanar& img) {
  if (img.channels() != 3) fail(Errc::kInvalidArgument, "rgb_to_ycbcr needs a 3-channel image");
  ImagePlanar out(img.rows(), img.cols(), 3, ColorSpace::kYCbCr);
  const auto r = img.plane(0), g = img.plane(1), b = img.plane(2);
  auto yo = out.plane(0), cbo = out.plane(1), cro = out.plane(2);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const YCbCr v = rgb_to_ycbcr(r[i], g[i], b[i]);
    yo[i] = static_cast<float>(v.y);
    cbo[i] = static_cast<float>(v.cb);
    cro[i] = static_cast<float>(v.cr);
  }
  return out;
}

/// Inverse of rgb_to_ycbcr; no clamping, so out-of-gamut combinations survive
/// for the caller to decide.
inline ImagePlanar ycbcr_to_rgb(const ImagePlanar& img, ColorSpace space = ColorSpace::kLinearSRGB) {
  if (img.channels() != 3) fail(Errc::kInvalidArgument, "ycbcr_to_rgb needs a 3-channel image");
  ImagePlanar out(img.rows(), img.cols(), 3, space);
  const auto y = img.plane(0), cb = img.plane(1), cr = img.plane(2);
  auto ro = out.plane(0), go = out.plane(1), bo = out.plane(2);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const Vec3 v = ycbcr_to_rgb(y[i], cb[i], cr[i]);
    ro[i] = static_cast<float>(v[0]);
    go[i] = static_cast<float>(v[1]);
    bo[i] = static_cast<float>(v[2]);
  }
  return out;
}

/// BT.601 luma plane of an RGB image; a single-plane input is returned as is.
inline ImagePlanar luma(const ImagePlanar& img) {
  if (img.channels() == 1) return img.channel(0);
  ImagePlanar out = make_plane(img.rows(), img.cols());
  const auto r = img.plane(0), g = img.plane(1), b = img.plane(2);
  auto y = out.data();
  for (std::size_t i = 0; i < img.pixel_count(); ++i) y[i] = static_cast<float>(luma601(r[i], g[i], b[i]));
  return out;
}

/// HSV value channel, max(R, G, B).
inline ImagePlanar rgb_to_hsv_value(const ImagePlanar& img) {
  if (img.channels() != 3) fail(Errc::kInvalidArgument, "rgb_to_hsv_value needs a 3-channel image");
  ImagePlanar out = make_plane(img.rows(), img.cols());
  const auto r = img.plane(0), g = img.plane(1), b = img.plane(2);
  auto v = out.data();
  for (std::size_t i = 0; i < img.pixel_count(); ++i) v[i] = std::max({r[i], g[i], b[i]});
  return out;
}

inline ImagePlanar gamma_encode(const ImagePlanar& img, double exponent) {
  if (!(exponent > 0.0) || !std::isfinite(exponent)) fail(Errc::kInvalidGamma, "gamma exponent must be > 0");
  ImagePlanar out = img;
  auto data = out.data();
  const std::size_t n = data.size();
  const std::size_t chunk = 1 << 14;
  parallel_for(0, (n + chunk - 1) / chunk, [&](std::size_t t) {
    const std::size_t end = std::min(n, (t + 1) * chunk);
    for (std::size_t i = t * chunk; i < end; ++i) {
      const double v = std::clamp(static_cast<double>(data[i]), 0.0, 1.0);
      data[i] = static_cast<float>(std::pow(v, exponent));
    }
  });
  return out;
}

/// round(v * 255) / 255, the single 8-bit quantization point of the pipeline.
inline ImagePlanar quantize_8bit(const ImagePlanar& img) {
  ImagePlanar out = img;
  for (float& v : out.data()) v = static_cast<float>(std::round(std::clamp(v, 0.0f, 1.0f) * 255.0f) / 255.0);
  return out;
}

}  // namespace nightforge
