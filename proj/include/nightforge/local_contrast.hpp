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

#include "nightforge/colorspace.hpp"
#include "nightforge/error.hpp"
#include "nightforge/filter.hpp"
#include "nightforge/image.hpp"
#include "nightforge/parallel.hpp"

namespace nightforge {

/// Gamma exponent from the mean luma: ln(0.5)/ln(mean) when mean >= 0.5,
/// ln(mean)/ln(0.5) otherwise.
inline double compute_gamma(double mean_y) {
  if (!(mean_y > 0.0 && mean_y < 1.0)) fail(Errc::kInvalidMean, "mean luma must lie in (0, 1)");
  return mean_y >= 0.5 ? std::log(0.5) / std::log(mean_y) : std::log(mean_y) / std::log(0.5);
}

/// Per-pixel local correction: y ^ (gamma ^ ((mask - 0.5) / 0.5)).
inline double lcc_pixel(double y, double mask, double gamma) {
  if (y <= 0.0) return 0.0;
  const double exponent = std::pow(gamma, (0.5 - (1.0 - mask)) / 0.5);
  return std::clamp(std::pow(y, exponent), 0.0, 1.0);
}

inline ImagePlanar build_mask(const ImagePlanar& y, double sigma) {
  if (!(sigma > 0.0)) fail(Errc::kInvalidArgument, "mask sigma must be > 0");
  ImagePlanar mask = gaussian_blur(y, sigma);
  clamp_unit(mask);
  return mask;
}

/// Default mask scale: a thirtieth of the short side.
inline double default_mask_sigma(int rows, int cols, double divisor = 30.0) {
  return std::max(0.5, std::min(rows, cols) / divisor);
}

inline ImagePlanar lcc_apply(const ImagePlanar& y, const ImagePlanar& mask, double gamma) {
  require_same_dims(y, mask, "lcc_apply");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) fail(Errc::kInvalidArgument, "gamma must be > 0");
  ImagePlanar out = make_plane(y.rows(), y.cols());
  const auto yin = y.plane(0);
  const auto m = mask.plane(0);
  auto dst = out.data();
  const std::size_t n = y.pixel_count();
  const std::size_t chunk = 1 << 14;
  parallel_for(0, (n + chunk - 1) / chunk, [&](std::size_t t) {
    const std::size_t end = std::min(n, (t + 1) * chunk);
    for (std::size_t i = t * chunk; i < end; ++i)
      dst[i] = static_cast<float>(lcc_pixel(std::clamp(yin[i], 0.0f, 1.0f), m[i], gamma));
  });
  return out;
}

struct LccResult {
  ImagePlanar y_in;   // luma before correction
  ImagePlanar y_out;  // corrected luma
  ImagePlanar mask;   // blurred y_in
  double gamma = 1.0;
  double mean_y = 0.5;
};

// Mean luma outside (0, 1) would make the gamma rule singular; inside the
// pipeline it is clamped to [1e-4, 1 - 1e-4] instead.
inline LccResult local_contrast_correct(const ImagePlanar& y, double mask_sigma) {
  LccResult res;
  res.y_in = y;
  double sum = 0.0;
  for (float v : y.plane(0)) sum += v;
  res.mean_y = y.pixel_count() ? sum / static_cast<double>(y.pixel_count()) : 0.5;
  res.gamma = compute_gamma(std::clamp(res.mean_y, 1e-4, 1.0 - 1e-4));
  res.mask = build_mask(y, mask_sigma);
  res.y_out = lcc_apply(y, res.mask, res.gamma);
  return res;
}

}  // namespace nightforge
