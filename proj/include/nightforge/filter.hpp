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
#include <span>
#include <vector>

#include "nightforge/error.hpp"
#include "nightforge/image.hpp"
#include "nightforge/parallel.hpp"

namespace nightforge {

/// Half-sample symmetric reflection (d c b a | a b c d | d c b a), valid for
/// any offset.
inline int reflect_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

/// Normalized, symmetric discrete Gaussian truncated at ceil(3 sigma).
/// Element k holds the weight for offset +-k.
inline std::vector<float> gaussian_half_kernel(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) fail(Errc::kInvalidArgument, "gaussian sigma must be > 0");
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> w(radius + 1);
  double sum = 0.0;
  for (int k = 0; k <= radius; ++k) {
    w[k] = std::exp(-0.5 * (k * k) / (sigma * sigma));
    sum += (k == 0 ? 1.0 : 2.0) * w[k];
  }
  std::vector<float> out(radius + 1);
  for (int k = 0; k <= radius; ++k) out[k] = static_cast<float>(w[k] / sum);
  return out;
}

namespace detail {

// Blurs every row of a rows x cols plane in place.
inline void blur_rows(std::span<float> plane, int rows, int cols, const std::vector<float>& kernel) {
  const int radius = static_cast<int>(kernel.size()) - 1;
  parallel_for(0, static_cast<std::size_t>(rows), [&](std::size_t r) {
    std::vector<float> padded(static_cast<std::size_t>(cols) + 2 * radius);
    std::vector<float> acc(cols);
    float* row = plane.data() + r * cols;
    for (int i = -radius; i < cols + radius; ++i) padded[i + radius] = row[reflect_index(i, cols)];
    const float* center = padded.data() + radius;
    for (int i = 0; i < cols; ++i) acc[i] = kernel[0] * center[i];
    for (int k = 1; k <= radius; ++k) {
      const float w = kernel[k];
      const float* lo = center - k;
      const float* hi = center + k;
      for (int i = 0; i < cols; ++i) acc[i] += w * (lo[i] + hi[i]);
    }
    std::copy(acc.begin(), acc.end(), row);
  });
}

inline void transpose(std::span<const float> src, int rows, int cols, std::span<float> dst) {
  constexpr int kTile = 32;
  const int row_tiles = (rows + kTile - 1) / kTile;
  parallel_for(0, static_cast<std::size_t>(row_tiles), [&](std::size_t t) {
    const int r0 = static_cast<int>(t) * kTile;
    const int r1 = std::min(rows, r0 + kTile);
    for (int c0 = 0; c0 < cols; c0 += kTile) {
      const int c1 = std::min(cols, c0 + kTile);
      for (int r = r0; r < r1; ++r)
        for (int c = c0; c < c1; ++c)
          dst[static_cast<std::size_t>(c) * rows + r] = src[static_cast<std::size_t>(r) * cols + c];
    }
  });
}

}  // namespace detail

/// Separable Gaussian blur of every channel with reflective borders.
inline ImagePlanar gaussian_blur(const ImagePlanar& img, double sigma) {
  const auto kernel = gaussian_half_kernel(sigma);
  ImagePlanar out = img;
  const int rows = img.rows();
  const int cols = img.cols();
  if (img.empty()) return out;
  std::vector<float> scratch(img.pixel_count());
  for (int ch = 0; ch < img.channels(); ++ch) {
    auto plane = out.plane(ch);
    detail::blur_rows(plane, rows, cols, kernel);
    detail::transpose(plane, rows, cols, scratch);
    detail::blur_rows(scratch, cols, rows, kernel);
    detail::transpose(scratch, cols, rows, plane);
  }
  return out;
}

}  // namespace nightforge
