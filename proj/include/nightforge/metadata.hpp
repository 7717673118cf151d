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

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nightforge/error.hpp"

namespace nightforge {

using Vec3 = std::array<double, 3>;

/// Row-major 3x3 matrix.
struct Mat3 {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  double operator()(int r, int c) const { return m[r * 3 + c]; }
  double& operator()(int r, int c) { return m[r * 3 + c]; }

  static Mat3 identity() { return {}; }

  double determinant() const {
    const auto& a = m;
    return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
           a[2] * (a[3] * a[7] - a[4] * a[6]);
  }

  Mat3 inverse() const {
    const double det = determinant();
    if (!(std::abs(det) > 1e-12)) fail(Errc::kSingularMatrix, "matrix determinant below 1e-12");
    const auto& a = m;
    Mat3 inv;
    inv.m = {(a[4] * a[8] - a[5] * a[7]) / det, (a[2] * a[7] - a[1] * a[8]) / det,
             (a[1] * a[5] - a[2] * a[4]) / det, (a[5] * a[6] - a[3] * a[8]) / det,
             (a[0] * a[8] - a[2] * a[6]) / det, (a[2] * a[3] - a[0] * a[5]) / det,
             (a[3] * a[7] - a[4] * a[6]) / det, (a[1] * a[6] - a[0] * a[7]) / det,
             (a[0] * a[4] - a[1] * a[3]) / det};
    return inv;
  }

  friend Mat3 operator*(const Mat3& a, const Mat3& b) {
    Mat3 out;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c)
        out(r, c) = a(r, 0) * b(0, c) + a(r, 1) * b(1, c) + a(r, 2) * b(2, c);
    return out;
  }

  friend Vec3 operator*(const Mat3& a, const Vec3& v) {
    return {a(0, 0) * v[0] + a(0, 1) * v[1] + a(0, 2) * v[2],
            a(1, 0) * v[0] + a(1, 1) * v[1] + a(1, 2) * v[2],
            a(2, 0) * v[0] + a(2, 1) * v[1] + a(2, 2) * v[2]};
  }
};

/// Rotation that brings the stored frame upright. JSON encodes it as degrees
/// clockwise: 0, 90, -90 or 180.
enum class Orientation { kLandscape0 = 0, kPortrait90CW = 90, kPortrait90CCW = -90, kRotate180 = 180 };

inline Orientation orientation_from_degrees(int degrees) {
  switch (degrees) {
    case 0: return Orientation::kLandscape0;
    case 90: return Orientation::kPortrait90CW;
    case -90:
    case 270: return Orientation::kPortrait90CCW;
    case 180:
    case -180: return Orientation::kRotate180;
    default: fail(Errc::kMalformedMetadata, "orientation must be one of 0, 90, -90, 180");
  }
}

inline Orientation inverse(Orientation o) {
  switch (o) {
    case Orientation::kPortrait90CW: return Orientation::kPortrait90CCW;
    case Orientation::kPortrait90CCW: return Orientation::kPortrait90CW;
    default: return o;
  }
}

inline bool swaps_axes(Orientation o) {
  return o == Orientation::kPortrait90CW || o == Orientation::kPortrait90CCW;
}

struct FrameMetadata {
  double black_level = 0.0;
  double white_level = 65535.0;
  std::array<int, 4> cfa_pattern{0, 1, 1, 2};  // 0=R 1=G 2=B, row-major 2x2 cell
  Mat3 color_matrix_1;                         // XYZ -> camera RGB
  std::vector<double> noise_profile{0.0};
  Orientation orientation = Orientation::kLandscape0;

  /// Throws MalformedMetadata when an invariant does not hold.
  void validate() const {
    auto bad = [](const std::string& why) { fail(Errc::kMalformedMetadata, why); };
    if (!std::isfinite(black_level) || !std::isfinite(white_level)) bad("levels must be finite");
    if (!(black_level < white_level)) bad("black_level must be below white_level");
    if (black_level < 0) bad("black_level must be nonnegative");
    int counts[3] = {0, 0, 0};
    for (int code : cfa_pattern) {
      if (code < 0 || code > 2) bad("cfa_pattern codes must be 0, 1 or 2");
      ++counts[code];
    }
    if (counts[0] != 1 || counts[1] != 2 || counts[2] != 1)
      bad("cfa_pattern must hold one red, two greens and one blue");
    for (double v : color_matrix_1.m)
      if (!std::isfinite(v)) bad("color_matrix_1 must be finite");
    if (!(std::abs(color_matrix_1.determinant()) > 1e-12)) bad("color_matrix_1 is not invertible");
    if (noise_profile.empty()) bad("noise_profile must not be empty");
    for (double v : noise_profile)
      if (!(v >= 0.0) || !std::isfinite(v)) bad("noise_profile entries must be finite and >= 0");
  }
};

/// Mosaiced sensor counts, row-major.
struct RawFrame {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint16_t> pixels;
  FrameMetadata meta;

  std::uint16_t at(int r, int c) const { return pixels[static_cast<std::size_t>(r) * cols + c]; }

  void validate() const {
    if (rows < 2 || cols < 2 || rows % 2 != 0 || cols % 2 != 0)
      fail(Errc::kBadDims, "raw frame dimensions must be even and at least 2x2");
    if (pixels.size() != static_cast<std::size_t>(rows) * cols)
      fail(Errc::kBadDims, "raw pixel buffer does not match dimensions");
    meta.validate();
  }
};

struct Size2 {
  int width = 0;
  int height = 0;
  bool operator==(const Size2&) const = default;
};

struct OutputSpec {
  Size2 landscape_size{1300, 866};
  Size2 portrait_size{866, 1300};
  int jpeg_quality = 100;
};

// Hook for sidecar layouts other than the native one: maps a foreign JSON
// document onto the native schema before parsing.
using MetadataConverter = std::function<nlohmann::json(const nlohmann::json&)>;

inline FrameMetadata parse_metadata(const nlohmann::json& doc) {
  auto bad = [](const std::string& why) -> void { fail(Errc::kMalformedMetadata, why); };
  if (!doc.is_object()) bad("metadata root must be an object");
  for (const char* key : {"black_level", "white_level", "cfa_pattern", "color_matrix_1", "noise_profile",
                          "orientation"}) {
    if (!doc.contains(key)) bad(std::string("missing field '") + key + "'");
  }
  FrameMetadata meta;
  try {
    meta.black_level = doc.at("black_level").get<double>();
    meta.white_level = doc.at("white_level").get<double>();

    const auto& cfa = doc.at("cfa_pattern");
    if (!cfa.is_array() || cfa.size() != 4) bad("cfa_pattern must have 4 entries");
    for (int i = 0; i < 4; ++i) meta.cfa_pattern[i] = cfa[i].get<int>();

    const auto& cm = doc.at("color_matrix_1");
    if (!cm.is_array() || cm.size() != 9) bad("color_matrix_1 must have 9 entries");
    for (int i = 0; i < 9; ++i) meta.color_matrix_1.m[i] = cm[i].get<double>();

    const auto& np = doc.at("noise_profile");
    if (!np.is_array()) bad("noise_profile must be an array");
    meta.noise_profile = np.get<std::vector<double>>();

    meta.orientation = orientation_from_degrees(doc.at("orientation").get<int>());
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("wrong field type: ") + e.what());
  }
  meta.validate();
  return meta;
}

inline nlohmann::json to_json(const FrameMetadata& meta) {
  return {{"black_level", meta.black_level},
          {"white_level", meta.white_level},
          {"cfa_pattern", meta.cfa_pattern},
          {"color_matrix_1", meta.color_matrix_1.m},
          {"noise_profile", meta.noise_profile},
          {"orientation", static_cast<int>(meta.orientation)}};
}

}  // namespace nightforge
