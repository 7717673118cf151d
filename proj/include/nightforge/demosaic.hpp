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

#include "nightforge/error.hpp"
#include "nightforge/image.hpp"
#include "nightforge/metadata.hpp"
#include "nightforge/parallel.hpp"

namespace nightforge {

/// 2x2 Bayer cell, channel codes 0=R 1=G 2=B.
class CfaLayout {
 public:
  explicit CfaLayout(const std::array<int, 4>& pattern) : cell_(pattern) {
    int counts[3] = {0, 0, 0};
    for (int code : pattern) {
      if (code < 0 || code > 2) fail(Errc::kInvalidArgument, "CFA code out of range");
      ++counts[code];
    }
    if (counts[0] != 1 || counts[1] != 2 || counts[2] != 1)
      fail(Errc::kInvalidArgument, "CFA cell needs one red, two greens and one blue");
  }

  static CfaLayout from(const FrameMetadata& meta) { return CfaLayout(meta.cfa_pattern); }

  int color_at(int r, int c) const { return cell_[((r & 1) << 1) | (c & 1)]; }
  const std::array<int, 4>& cell() const { return cell_; }

 private:
  std::array<int, 4> cell_;
};

namespace detail {

// Mirror about the first/last sample (-1 -> 1, n -> n-2); keeps CFA parity so
// the sample taken across a border has the same color as the one inside.
inline int mirror101(int i, int n) {
  if (i < 0) return -i;
  if (i >= n) return 2 * (n - 1) - i;
  return i;
}

}  // namespace detail

// Bilinear demosaic. Native sites copy the mosaic; elsewhere each channel is
// the mean of the nearest same-color neighbors (2 or 4 of them). Samples past
// the border come from the mirrored same-color site.
inline ImagePlanar demosaic_bilinear(const ImagePlanar& mosaic, const CfaLayout& layout) {
  const int rows = mosaic.rows();
  const int cols = mosaic.cols();
  if (mosaic.channels() != 1) fail(Errc::kInvalidArgument, "demosaic needs a single-plane mosaic");
  if (rows < 2 || cols < 2 || rows % 2 || cols % 2)
    fail(Errc::kBadDims, "mosaic dimensions must be even, got " + std::to_string(rows) + "x" +
                             std::to_string(cols));

  ImagePlanar out(rows, cols, 3, ColorSpace::kCameraRGB);
  auto sample = [&](int r, int c) { return mosaic(detail::mirror101(r, rows), detail::mirror101(c, cols)); };

  parallel_for(0, static_cast<std::size_t>(rows), [&](std::size_t rr) {
    const int r = static_cast<int>(rr);
    for (int c = 0; c < cols; ++c) {
      const int own = layout.color_at(r, c);
      for (int ch = 0; ch < 3; ++ch) {
        float v;
        if (ch == own) {
          v = mosaic(r, c);
        } else if (ch == 1) {
          // Green at a red/blue site: four orthogonal neighbors.
          v = 0.25f * (sample(r - 1, c) + sample(r + 1, c) + sample(r, c - 1) + sample(r, c + 1));
        } else if (own == 1) {
          // Red/blue at a green site: the pair in the row or in the column.
          if (layout.color_at(r, c + 1) == ch)
            v = 0.5f * (sample(r, c - 1) + sample(r, c + 1));
          else
            v = 0.5f * (sample(r - 1, c) + sample(r + 1, c));
        } else {
          // Red at blue or blue at red: four diagonal neighbors.
          v = 0.25f * (sample(r - 1, c - 1) + sample(r - 1, c + 1) + sample(r + 1, c - 1) +
                       sample(r + 1, c + 1));
        }
        out(r, c, ch) = v;
      }
    }
  });
  return out;
}

}  // namespace nightforge
