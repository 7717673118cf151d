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
#include <cmath>
#include <cstdint>
#include <numeric>

#include "nightforge/colorspace.hpp"
#include "nightforge/error.hpp"
#include "nightforge/filter.hpp"
#include "nightforge/image.hpp"

namespace nightforge {

// 256 bins over [0, 1]; bin b is centred on the value b / 255.
struct Histogram256 {
  std::array<std::uint64_t, 256> bins{};

  std::uint64_t total() const { return std::accumulate(bins.begin(), bins.end(), std::uint64_t{0}); }

  std::array<std::uint64_t, 256> cumulative() const {
    std::array<std::uint64_t, 256> cum{};
    std::partial_sum(bins.begin(), bins.end(), cum.begin());
    return cum;
  }

  bool operator==(const Histogram256&) const = default;
};

inline int bin_of(double v) {
  return static_cast<int>(std::clamp(std::floor(v * 255.0 + 0.5), 0.0, 255.0));
}

inline double bin_value(int bin) { return bin / 255.0; }

inline Histogram256 histogram(std::span<const float> values) {
  Histogram256 h;
  for (float v : values) ++h.bins[bin_of(v)];
  return h;
}

inline Histogram256 histogram(const ImagePlanar& plane) { return histogram(plane.plane(0)); }

/// Nearest-rank percentile on the bins: the lowest bin whose cumulative count
/// reaches ceil(percent/100 * total). Returns 0 for an empty histogram.
inline int percentile_bin(const Histogram256& h, double percent) {
  const std::uint64_t total = h.total();
  if (total == 0) return 0;
  const auto rank = std::max<std::uint64_t>(
      1, static_cast<std::uint64_t>(std::ceil(percent * static_cast<double>(total) / 100.0)));
  std::uint64_t cum = 0;
  for (int b = 0; b < 256; ++b) {
    cum += h.bins[b];
    if (cum >= rank) return b;
  }
  return 255;
}

// ---------------------------------------------------------------------------
// Dark pixels

enum class ChromaMode { kMagnitude, kLiteral };

struct DarkPixelRule {
  double y_threshold = 0.14;
  double cr_threshold = 0.07;
  ChromaMode mode = ChromaMode::kMagnitude;
};

/// Distance of (Cb, Cr) from neutral. Literal mode keeps the signed sum,
/// magnitude mode sums absolute offsets.
inline double chroma_radius(double cb, double cr, ChromaMode mode = ChromaMode::kMagnitude) {
  if (mode == ChromaMode::kLiteral) return ((cb - 0.5) * 2.0 + (cr - 0.5) * 2.0) / 2.0;
  return (std::abs(cb - 0.5) * 2.0 + std::abs(cr - 0.5) * 2.0) / 2.0;
}

inline bool is_dark(double y, double cb, double cr, const DarkPixelRule& rule) {
  return y < rule.y_threshold && chroma_radius(cb, cr, rule.mode) < rule.cr_threshold;
}

inline std::size_t count_dark(const ImagePlanar& ycbcr, const DarkPixelRule& rule = {}) {
  if (ycbcr.channels() != 3) fail(Errc::kInvalidArgument, "count_dark needs a YCbCr image");
  const auto y = ycbcr.plane(0), cb = ycbcr.plane(1), cr = ycbcr.plane(2);
  std::size_t count = 0;
  for (std::size_t i = 0; i < ycbcr.pixel_count(); ++i) count += is_dark(y[i], cb[i], cr[i], rule);
  return count;
}

/// Luma histogram restricted to the dark pixels of a YCbCr image.
inline Histogram256 dark_histogram(const ImagePlanar& ycbcr, const DarkPixelRule& rule) {
  const auto y = ycbcr.plane(0), cb = ycbcr.plane(1), cr = ycbcr.plane(2);
  Histogram256 h;
  for (std::size_t i = 0; i < ycbcr.pixel_count(); ++i)
    if (is_dark(y[i], cb[i], cr[i], rule)) ++h.bins[bin_of(y[i])];
  return h;
}

// ---------------------------------------------------------------------------
// Histogram stretch

struct StretchParams {
  double dark_percent = 30.0;     // cumulative share of dark pixels that fixes the low bin
  double low_percentile = 2.0;    // fallback low end when no pixel is dark
  double high_percentile = 98.0;
  int clip_limit = 50;            // max bins clipped at either end
};

struct StretchRange {
  int lo = 0;
  int hi = 255;
  int clip_limit = 50;

  bool valid() const {
    return 0 <= lo && lo < hi && hi <= 255 && lo <= clip_limit && 255 - hi <= clip_limit;
  }
};

// Low end: when the corrected image has dark pixels, the bin shift between
// the 30%-of-dark-pixels points of the corrected and original luma (each
// measured on its own dark set); otherwise the 2nd percentile of the corrected
// luma. High end: 98th percentile of the corrected luma. At most clip_limit
// bins are given up at either end.
inline StretchRange stretch_range(const ImagePlanar& before_ycbcr, const ImagePlanar& after_ycbcr,
                                  const DarkPixelRule& rule = {}, const StretchParams& p = {}) {
  require_same_dims(before_ycbcr, after_ycbcr, "stretch_range");
  if (before_ycbcr.channels() != 3 || after_ycbcr.channels() != 3)
    fail(Errc::kInvalidArgument, "stretch_range needs YCbCr images");
  if (p.clip_limit < 0 || p.clip_limit > 127) fail(Errc::kInvalidArgument, "clip_limit out of range");

  StretchRange range;
  range.clip_limit = p.clip_limit;
  const Histogram256 after_dark = dark_histogram(after_ycbcr, rule);
  if (after_dark.total() > 0) {
    const Histogram256 before_dark = dark_histogram(before_ycbcr, rule);
    range.lo = percentile_bin(after_dark, p.dark_percent) - percentile_bin(before_dark, p.dark_percent);
  } else {
    range.lo = percentile_bin(histogram(after_ycbcr.plane(0)), p.low_percentile);
  }
  range.hi = percentile_bin(histogram(after_ycbcr.plane(0)), p.high_percentile);
  range.lo = std::clamp(range.lo, 0, p.clip_limit);
  range.hi = std::clamp(range.hi, 255 - p.clip_limit, 255);
  return range;
}

inline double stretch_value(double v, const StretchRange& range) {
  const double lo = bin_value(range.lo);
  const double hi = bin_value(range.hi);
  return std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
}

inline ImagePlanar apply_stretch(const ImagePlanar& plane, const StretchRange& range) {
  if (!(range.lo < range.hi)) fail(Errc::kInvalidArgument, "stretch range must have lo < hi");
  ImagePlanar out = plane;
  for (float& v : out.data()) v = static_cast<float>(stretch_value(v, range));
  return out;
}

// ---------------------------------------------------------------------------
// Saturation

enum class SaturationVariant {
  kPrinted,   // 0.5 * (Yh/Y) * (C + Y) + C - Y
  kBalanced,  // 0.5 * (Yh/Y) * (C + Y) + 0.5 * (C - Y); identity when Yh == Y
};

inline double saturate_channel(double c, double y, double y_hat,
                               SaturationVariant variant = SaturationVariant::kPrinted) {
  const double ratio = y_hat / std::max(y, 1e-6);
  const double detail = variant == SaturationVariant::kPrinted ? c - y : 0.5 * (c - y);
  return 0.5 * ratio * (c + y) + detail;
}

/// Rebuilds RGB around the new luma y_out. `rgb` and `y_in` are the image and
/// luma before correction.
inline ImagePlanar saturation_enhance(const ImagePlanar& rgb, const ImagePlanar& y_in, const ImagePlanar& y_out,
                                      SaturationVariant variant = SaturationVariant::kPrinted) {
  require_same_dims(rgb, y_in, "saturation_enhance");
  require_same_dims(rgb, y_out, "saturation_enhance");
  if (rgb.channels() != 3) fail(Errc::kInvalidArgument, "saturation_enhance needs an RGB image");
  ImagePlanar out(rgb.rows(), rgb.cols(), 3, rgb.space());
  const auto yi = y_in.plane(0), yo = y_out.plane(0);
  for (int ch = 0; ch < 3; ++ch) {
    const auto src = rgb.plane(ch);
    auto dst = out.plane(ch);
    for (std::size_t i = 0; i < rgb.pixel_count(); ++i)
      dst[i] = static_cast<float>(std::clamp(saturate_channel(src[i], yi[i], yo[i], variant), 0.0, 1.0));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Black point

enum class BlackPointMode {
  kSubtract,  // out = max(0, in - t), levels-style
  kHardZero,  // pixels with V <= t set to zero, others untouched
};

/// The percentile bin of V, reported as the largest V falling in that bin.
inline double black_point_threshold(const ImagePlanar& value, double percent) {
  const int bin = percentile_bin(histogram(value), percent);
  double t = 0.0;
  for (float v : value.plane(0))
    if (bin_of(v) == bin) t = std::max(t, static_cast<double>(v));
  return t;
}

inline ImagePlanar black_point_correct(const ImagePlanar& rgb, double percent = 20.0,
                                       BlackPointMode mode = BlackPointMode::kSubtract) {
  const ImagePlanar value = rgb_to_hsv_value(rgb);
  const double t = black_point_threshold(value, percent);
  ImagePlanar out = rgb;
  if (mode == BlackPointMode::kSubtract) {
    for (float& v : out.data()) v = static_cast<float>(std::max(0.0, v - t));
  } else {
    const auto val = value.plane(0);
    for (int ch = 0; ch < 3; ++ch) {
      auto p = out.plane(ch);
      for (std::size_t i = 0; i < out.pixel_count(); ++i)
        if (val[i] <= t) p[i] = 0.0f;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sharpening

inline ImagePlanar unsharp_mask(const ImagePlanar& img, double sigma, double amount) {
  if (!(sigma > 0.0)) fail(Errc::kInvalidArgument, "unsharp sigma must be > 0");
  if (!(amount >= 0.0)) fail(Errc::kInvalidArgument, "unsharp amount must be >= 0");
  if (amount == 0.0) return img;
  const ImagePlanar blurred = gaussian_blur(img, sigma);
  ImagePlanar out = img;
  auto dst = out.data();
  const auto low = blurred.data();
  for (std::size_t i = 0; i < dst.size(); ++i)
    dst[i] = static_cast<float>(std::clamp(dst[i] + amount * (dst[i] - low[i]), 0.0, 1.0));
  return out;
}

}  // namespace nightforge
