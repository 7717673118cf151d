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
#include <random>
#include <vector>

#include "nightforge/colorspace.hpp"
#include "nightforge/image.hpp"
#include "nightforge/metadata.hpp"
#include "nightforge/parallel.hpp"

namespace nightforge {

// A typical XYZ -> camera matrix of a full-frame mirrorless sensor.
inline const Mat3 kSampleColorMatrix{{0.7374, -0.2389, -0.0551,   //
                                      -0.5435, 1.3162, 0.2519,    //
                                      -0.1006, 0.1795, 0.6552}};

struct NightSceneParams {
  int rows = 512;
  int cols = 768;
  std::uint64_t seed = 1;
  Vec3 cast{1.35, 1.0, 0.7};        // illuminant applied in camera space
  double read_noise = 0.004;        // std-dev on the [0,1] scale
  double shot_noise = 0.0004;       // variance per unit signal
  double exposure = 1.0;
  Orientation orientation = Orientation::kLandscape0;
  std::vector<double> noise_profile{0.03, 0.05};  // mid class by default
  double black_level = 512.0;
  double white_level = 16383.0;
};

struct SyntheticFrame {
  RawFrame raw;
  ImagePlanar scene;  // noiseless linear sRGB ground truth, [0, 1]
};

namespace synth_detail {

inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline double unit(std::uint64_t h) { return static_cast<double>(h >> 11) * (1.0 / 9007199254740992.0); }

struct Building {
  double x0, x1, top;  // fractions of width / height
  Vec3 tint;
  double window_density;
};

struct Light {
  double x, y, radius;  // fractions
  Vec3 color;
};

struct Layout {
  std::vector<Building> buildings;
  std::vector<Light> lamps;
  std::vector<Light> signs;
};

inline Layout make_layout(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Layout l;
  double x = 0.0;
  while (x < 1.0) {
    const double w = 0.06 + 0.12 * u(rng);
    const double t = 0.25 + 0.35 * u(rng);
    const double shade = 0.6 + 0.4 * u(rng);
    l.buildings.push_back({x, std::min(1.0, x + w), t, {0.030 * shade, 0.028 * shade, 0.034 * shade},
                           0.15 + 0.35 * u(rng)});
    x += w + 0.01 * u(rng);
  }
  for (int i = 0; i < 6; ++i)
    l.lamps.push_back({0.08 + 0.84 * u(rng), 0.72 + 0.08 * u(rng), 0.008 + 0.008 * u(rng), {1.6, 1.3, 0.8}});
  const Vec3 palette[] = {{0.55, 0.05, 0.08}, {0.05, 0.45, 0.12}, {0.08, 0.15, 0.60}, {0.50, 0.10, 0.45}};
  for (int i = 0; i < 5; ++i)
    l.signs.push_back({0.1 + 0.8 * u(rng), 0.35 + 0.3 * u(rng), 0.02 + 0.02 * u(rng), palette[i % 4]});
  return l;
}

// Linear sRGB radiance at normalized coordinates (u right, v down).
inline Vec3 radiance(const Layout& l, double u, double v, int r, int c, std::uint64_t seed) {
  // Sky: near black with a faint glow at the horizon; ground: dark asphalt.
  Vec3 px = v < 0.7 ? Vec3{0.004 + 0.012 * v, 0.005 + 0.012 * v, 0.012 + 0.016 * v}
                    : Vec3{0.010, 0.010, 0.011};
  if (v >= 0.7) {
    const double grain = 0.004 * unit(mix(seed ^ (static_cast<std::uint64_t>(r) << 32) ^ c));
    for (double& ch : px) ch += grain;
  }
  for (const Building& b : l.buildings) {
    if (u < b.x0 || u >= b.x1 || v < b.top || v >= 0.7) continue;
    // Brick texture, then a window grid.
    const double tex = 0.75 + 0.5 * unit(mix(seed + 7 * (r / 3) + 131 * (c / 5)));
    px = {b.tint[0] * tex, b.tint[1] * tex, b.tint[2] * tex};
    const double wu = (u - b.x0) * 80.0, wv = (v - b.top) * 60.0;
    const double fu = wu - std::floor(wu), fv = wv - std::floor(wv);
    if (fu > 0.25 && fu < 0.75 && fv > 0.3 && fv < 0.8) {
      const auto cell = mix(seed ^ (static_cast<std::uint64_t>(wu) * 977) ^ (static_cast<std::uint64_t>(wv) * 7919) ^
                            static_cast<std::uint64_t>(b.x0 * 1e6));
      if (unit(cell) < b.window_density) {
        const double level = 0.25 + 0.4 * unit(mix(cell));
        px = {level, level * 0.8, level * 0.45};
      }
    }
    break;
  }
  for (const Light& s : l.signs) {
    if (std::abs(u - s.x) < s.radius * 2 && std::abs(v - s.y) < s.radius) px = s.color;
  }
  for (const Light& lamp : l.lamps) {
    const double du = u - lamp.x, dv = (v - lamp.y) * 1.4;
    const double g = std::exp(-(du * du + dv * dv) / (2 * lamp.radius * lamp.radius));
    for (int ch = 0; ch < 3; ++ch) px[ch] += lamp.color[ch] * g;
  }
  return px;
}

}  // namespace synth_detail

/// Deterministic synthetic night street: dark sky and ground, textured
/// buildings with lit windows, clipped street lamps and colored signs. The
/// scene is mapped back to camera space, cast, mosaiced and given
/// signal-dependent noise.
inline SyntheticFrame make_night_scene(const NightSceneParams& p) {
  if (p.rows < 2 || p.cols < 2 || p.rows % 2 || p.cols % 2)
    fail(Errc::kBadDims, "synthetic frame dimensions must be even and at least 2x2");
  SyntheticFrame out;
  FrameMetadata& meta = out.raw.meta;
  meta.black_level = p.black_level;
  meta.white_level = p.white_level;
  meta.color_matrix_1 = kSampleColorMatrix;
  meta.noise_profile = p.noise_profile;
  meta.orientation = p.orientation;
  out.raw.rows = p.rows;
  out.raw.cols = p.cols;
  out.raw.pixels.assign(static_cast<std::size_t>(p.rows) * p.cols, 0);
  out.scene = ImagePlanar(p.rows, p.cols, 3, ColorSpace::kLinearSRGB);

  const synth_detail::Layout layout = synth_detail::make_layout(p.seed);
  const Mat3 srgb_to_cam = camera_to_srgb_matrix(meta).inverse();
  const double range = p.white_level - p.black_level;

  parallel_for(0, static_cast<std::size_t>(p.rows), [&](std::size_t rr) {
    const int r = static_cast<int>(rr);
    std::mt19937_64 rng(synth_detail::mix(p.seed * 0x100000001b3ULL + rr));
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double v = (r + 0.5) / p.rows;
    for (int c = 0; c < p.cols; ++c) {
      const double u = (c + 0.5) / p.cols;
      Vec3 rgb = synth_detail::radiance(layout, u, v, r, c, p.seed);
      for (int ch = 0; ch < 3; ++ch) {
        rgb[ch] *= p.exposure;
        out.scene(r, c, ch) = static_cast<float>(std::clamp(rgb[ch], 0.0, 1.0));
      }
      const Vec3 cam = srgb_to_cam * rgb;
      const int ch = ((r & 1) << 1) | (c & 1);
      const int color = meta.cfa_pattern[static_cast<std::size_t>(ch)];
      double s = std::max(0.0, cam[color] * p.cast[color]);
      s += gauss(rng) * std::sqrt(p.read_noise * p.read_noise + p.shot_noise * s);
      const double counts = std::round(p.black_level + std::clamp(s, 0.0, 1.0) * range);
      out.raw.pixels[rr * p.cols + c] = static_cast<std::uint16_t>(counts);
    }
  });
  return out;
}

}  // namespace nightforge
