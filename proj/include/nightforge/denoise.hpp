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
#include <array>
#include <numeric>
#include <string_view>
#include <vector>

#include "nightforge/bm3d.hpp"
#include "nightforge/colorspace.hpp"
#include "nightforge/error.hpp"
#include "nightforge/filter.hpp"
#include "nightforge/image.hpp"
#include "nightforge/local_contrast.hpp"
#include "nightforge/nlm.hpp"

namespace nightforge {

enum class NoiseLevel { kLow, kMid, kHigh };

constexpr std::string_view to_string(NoiseLevel l) {
  switch (l) {
    case NoiseLevel::kLow: return "low";
    case NoiseLevel::kMid: return "mid";
    case NoiseLevel::kHigh: return "high";
  }
  return "?";
}

struct NoiseClass {
  NoiseLevel level = NoiseLevel::kLow;
  double sigma = 0.2;
};

struct NoiseClassTable {
  double threshold_low = 0.02;   // mean profile below -> low
  double threshold_high = 0.06;  // mean profile at or above -> high
  std::array<double, 3> sigma{0.2, 0.6, 0.8};
};

/// Buckets the mean of the noise profile into three denoising strengths.
inline NoiseClass classify_noise(const std::vector<double>& profile, const NoiseClassTable& table = {}) {
  if (profile.empty()) fail(Errc::kEmptyProfile, "noise profile is empty");
  if (!(table.threshold_low < table.threshold_high))
    fail(Errc::kInvalidArgument, "noise class thresholds must be increasing");
  const double mean = std::accumulate(profile.begin(), profile.end(), 0.0) / static_cast<double>(profile.size());
  if (mean < table.threshold_low) return {NoiseLevel::kLow, table.sigma[0]};
  if (mean < table.threshold_high) return {NoiseLevel::kMid, table.sigma[1]};
  return {NoiseLevel::kHigh, table.sigma[2]};
}

enum class DenoiseMethod { kBm3d, kNlm, kNone };
enum class DenoiseColorMode { kPerChannel, kLumaChroma };

struct DenoiseParams {
  DenoiseMethod method = DenoiseMethod::kBm3d;
  DenoiseColorMode color_mode = DenoiseColorMode::kPerChannel;
  Bm3dParams bm3d;
  NlmParams nlm;
};

inline ImagePlanar denoise(const ImagePlanar& img, double sigma, const DenoiseParams& p = {}) {
  if (p.method == DenoiseMethod::kNone) return img;
  auto run = [&](const ImagePlanar& x) {
    return p.method == DenoiseMethod::kBm3d ? bm3d(x, sigma, p.bm3d) : nlm(x, sigma, p.nlm);
  };
  if (p.color_mode == DenoiseColorMode::kLumaChroma && img.channels() == 3) {
    ImagePlanar out = ycbcr_to_rgb(run(rgb_to_ycbcr(img)), img.space());
    clamp_unit(out);
    return out;
  }
  return run(img);
}

struct BlendParams {
  double u = 0.6;           // share of the noisy image kept where the mask is 1
  double mask_sigma = 0.0;  // <= 0: a thirtieth of the short side
};

/// d * (1 - mask * u) + n * (mask * u)
inline double blend_pixel(double denoised, double noisy, double mask, double u) {
  return denoised * (1.0 - mask * u) + noisy * (mask * u);
}

inline ImagePlanar blend_with_mask(const ImagePlanar& denoised, const ImagePlanar& noisy, const ImagePlanar& mask,
                                   double u) {
  require_same_dims(denoised, noisy, "blend");
  require_same_dims(denoised, mask, "blend mask");
  if (!denoised.same_shape(noisy)) fail(Errc::kDimMismatch, "blend: channel count differs");
  if (!(u >= 0.0 && u <= 1.0)) fail(Errc::kInvalidArgument, "blend u must lie in [0, 1]");
  ImagePlanar out(denoised.rows(), denoised.cols(), denoised.channels(), denoised.space());
  const auto m = mask.plane(0);
  for (int ch = 0; ch < denoised.channels(); ++ch) {
    const auto d = denoised.plane(ch), n = noisy.plane(ch);
    auto o = out.plane(ch);
    for (std::size_t i = 0; i < o.size(); ++i)
      o[i] = static_cast<float>(std::clamp(blend_pixel(d[i], n[i], m[i], u), 0.0, 1.0));
  }
  return out;
}

/// Mask = Gaussian-blurred luma of the noisy image; bright areas keep more of it.
inline ImagePlanar blend_mask(const ImagePlanar& noisy, const BlendParams& p) {
  const double sigma = p.mask_sigma > 0 ? p.mask_sigma : default_mask_sigma(noisy.rows(), noisy.cols());
  return build_mask(luma(noisy), sigma);
}

inline ImagePlanar blend_masked(const ImagePlanar& denoised, const ImagePlanar& noisy, const BlendParams& p = {}) {
  require_same_dims(denoised, noisy, "blend");
  return blend_with_mask(denoised, noisy, blend_mask(noisy, p), p.u);
}

}  // namespace nightforge
