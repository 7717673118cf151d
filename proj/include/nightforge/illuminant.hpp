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
#include <cstdint>
#include <utility>
#include <vector>

#include "nightforge/colorspace.hpp"
#include "nightforge/error.hpp"
#include "nightforge/filter.hpp"
#include "nightforge/image.hpp"

namespace nightforge {

/// Per-channel multiplicative white-balance corrections.
struct Illuminant {
  Vec3 gains{1.0, 1.0, 1.0};
};

inline Vec3 channel_means(const ImagePlanar& img) {
  if (img.channels() != 3) fail(Errc::kInvalidArgument, "expected a 3-channel image");
  Vec3 means{0, 0, 0};
  if (img.pixel_count() == 0) return means;
  for (int ch = 0; ch < 3; ++ch) {
    double sum = 0.0;
    for (float v : img.plane(ch)) sum += v;
    means[ch] = sum / static_cast<double>(img.pixel_count());
  }
  return means;
}

/// Gray World, anchored on green: g_c = mean_G / mean_c.
inline Illuminant gray_world_estimate(const ImagePlanar& img) {
  constexpr double kFloor = 1e-8;
  if (img.empty()) fail(Errc::kDegenerateImage, "gray world on an empty image");
  const Vec3 mu = channel_means(img);
  if (mu[0] <= kFloor && mu[1] <= kFloor && mu[2] <= kFloor)
    fail(Errc::kDegenerateImage, "all channel means are ~0");
  const Vec3 m{std::max(mu[0], kFloor), std::max(mu[1], kFloor), std::max(mu[2], kFloor)};
  return {{m[1] / m[0], 1.0, m[1] / m[2]}};
}

inline ImagePlanar apply_gains(const ImagePlanar& img, const Illuminant& ill) {
  for (double g : ill.gains)
    if (!(g > 0.0) || !std::isfinite(g)) fail(Errc::kInvalidArgument, "gains must be finite and > 0");
  if (img.channels() != 3) fail(Errc::kInvalidArgument, "apply_gains needs a 3-channel image");
  ImagePlanar out = img;
  for (int ch = 0; ch < 3; ++ch) {
    const double g = ill.gains[ch];
    for (float& v : out.plane(ch)) v = static_cast<float>(std::clamp(v * g, 0.0, 1.0));
  }
  return out;
}

struct GraynessIndexParams {
  double blur_sigma = 0.5;       // pre-blur before taking logs, px
  double top_fraction = 0.001;   // share of candidate pixels kept as "gray"
  double dark_floor = 0.02;      // pixels with any channel below are ignored
  double saturation = 0.98;      // pixels with any channel at or above are ignored
  double contrast_floor = 1e-4;  // minimum |grad log L| for the normalized score
  double log_epsilon = 1e-6;
};

// Grayness Index: a pixel is gray when its log-chromaticity does not change
// while its luminance does. The score is
//   |(grad log(R/G), grad log(B/G))| / |grad log L|
// over pixels that are neither dark nor clipped. The lowest-scoring
// `top_fraction` of them are averaged into the illuminant. If no candidate has
// luminance structure, the unnormalized chroma gradient is ranked instead.
// Returned gains are inverse illuminant, scaled to a maximum of exactly 1.
inline Illuminant grayness_index_estimate(const ImagePlanar& img, const GraynessIndexParams& p = {}) {
  if (img.channels() != 3) fail(Errc::kInvalidArgument, "grayness index needs a 3-channel image");
  const int rows = img.rows();
  const int cols = img.cols();
  if (rows < 16 || cols < 16) fail(Errc::kImageTooSmall, "grayness index needs at least 16x16 pixels");

  const ImagePlanar smooth = p.blur_sigma > 0 ? gaussian_blur(img, p.blur_sigma) : img;
  const std::size_t n = img.pixel_count();
  std::vector<float> log_rg(n), log_bg(n), log_l(n);
  const auto r = smooth.plane(0), g = smooth.plane(1), b = smooth.plane(2);
  for (std::size_t i = 0; i < n; ++i) {
    const double lr = std::log(std::max<double>(r[i], p.log_epsilon));
    const double lg = std::log(std::max<double>(g[i], p.log_epsilon));
    const double lb = std::log(std::max<double>(b[i], p.log_epsilon));
    log_rg[i] = static_cast<float>(lr - lg);
    log_bg[i] = static_cast<float>(lb - lg);
    log_l[i] = static_cast<float>(std::log(std::max<double>((r[i] + g[i] + b[i]) / 3.0, p.log_epsilon)));
  }

  auto grad2 = [&](const std::vector<float>& f, int y, int x) {
    const int x0 = std::max(0, x - 1), x1 = std::min(cols - 1, x + 1);
    const int y0 = std::max(0, y - 1), y1 = std::min(rows - 1, y + 1);
    const double gx = (f[static_cast<std::size_t>(y) * cols + x1] - f[static_cast<std::size_t>(y) * cols + x0]) /
                      std::max(1, x1 - x0);
    const double gy = (f[static_cast<std::size_t>(y1) * cols + x] - f[static_cast<std::size_t>(y0) * cols + x]) /
                      std::max(1, y1 - y0);
    return gx * gx + gy * gy;
  };

  const auto r0 = img.plane(0), g0 = img.plane(1), b0 = img.plane(2);
  std::vector<std::pair<double, std::uint32_t>> textured, flat;
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * cols + x;
      const float lo = std::min({r0[i], g0[i], b0[i]});
      const float hi = std::max({r0[i], g0[i], b0[i]});
      if (lo < p.dark_floor || hi >= p.saturation) continue;
      const double chroma = std::sqrt(grad2(log_rg, y, x) + grad2(log_bg, y, x));
      const double contrast = std::sqrt(grad2(log_l, y, x));
      if (contrast > p.contrast_floor)
        textured.emplace_back(chroma / contrast, static_cast<std::uint32_t>(i));
      else
        flat.emplace_back(chroma, static_cast<std::uint32_t>(i));
    }
  }
  auto& candidates = textured.empty() ? flat : textured;
  if (candidates.empty()) fail(Errc::kDegenerateImage, "no usable gray-pixel candidates");

  const std::size_t keep = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(p.top_fraction * static_cast<double>(candidates.size()))), 1,
      candidates.size());
  std::nth_element(candidates.begin(), candidates.begin() + (keep - 1), candidates.end());
  Vec3 sum{0, 0, 0};
  for (std::size_t k = 0; k < keep; ++k) {
    const std::uint32_t i = candidates[k].second;
    sum[0] += r0[i];
    sum[1] += g0[i];
    sum[2] += b0[i];
  }
  const double lowest = std::min({sum[0], sum[1], sum[2]});
  if (!(lowest > 0.0)) fail(Errc::kDegenerateImage, "gray-pixel illuminant has a zero channel");
  return {{lowest / sum[0], lowest / sum[1], lowest / sum[2]}};
}

/// Estimates on `clean` (noise-robust) and corrects `blended`.
inline ImagePlanar estimate_on_clean_apply_to_blended(const ImagePlanar& clean, const ImagePlanar& blended,
                                                      const GraynessIndexParams& p = {}) {
  require_same_dims(clean, blended, "grayness index clean/blended");
  return apply_gains(blended, grayness_index_estimate(clean, p));
}

}  // namespace nightforge
