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
#include <vector>

#include "nightforge/error.hpp"
#include "nightforge/image.hpp"
#include "nightforge/parallel.hpp"

namespace nightforge {

struct NlmParams {
  int patch = 7;          // full width, odd
  int search = 21;        // full width, odd
  double h_factor = 0.8;  // filtering strength h = h_factor * sigma

  void validate() const {
    if (patch < 1 || patch % 2 == 0) fail(Errc::kInvalidArgument, "nlm patch size must be odd and >= 1");
    if (search < 3 || search % 2 == 0) fail(Errc::kInvalidArgument, "nlm search window must be odd and >= 3");
    if (!(h_factor > 0)) fail(Errc::kInvalidArgument, "nlm h_factor must be > 0");
  }
};

namespace nlm_detail {

// exp(-x) on [0, kRange) sampled at 1/kStep, linearly interpolated.
class ExpTable {
 public:
  static constexpr int kStep = 256;
  static constexpr float kRange = 32.0f;

  ExpTable() : table_(static_cast<std::size_t>(kRange * kStep) + 2) {
    for (std::size_t i = 0; i < table_.size(); ++i) table_[i] = static_cast<float>(std::exp(-double(i) / kStep));
  }

  float operator()(float x) const {
    if (x >= kRange) return 0.0f;
    const float pos = x * kStep;
    const int i = static_cast<int>(pos);
    const float f = pos - static_cast<float>(i);
    return table_[i] + f * (table_[i + 1] - table_[i]);
  }

 private:
  std::vector<float> table_;
};

inline const ExpTable& exp_table() {
  static const ExpTable table;
  return table;
}

inline int mirror(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) i = i < 0 ? -i : 2 * (n - 1) - i;
  return i;
}

}  // namespace nlm_detail

// Pixelwise non-local means. Weights are exp(-max(d2 - 2 sigma^2, 0) / h^2)
// with d2 the mean squared patch difference; the centre pixel takes the
// largest weight seen among its neighbours. Distances for one displacement
// are box sums over a squared-difference image, so the cost per displacement
// is independent of the patch size. Rows are split across threads; each
// output pixel is accumulated in a fixed displacement order.
inline ImagePlanar nlm_plane(const ImagePlanar& plane, double sigma, const NlmParams& params = {}) {
  params.validate();
  if (plane.channels() != 1) fail(Errc::kInvalidArgument, "nlm_plane needs a single plane");
  if (!(sigma > 0.0)) fail(Errc::kInvalidArgument, "nlm sigma must be > 0");
  if (plane.rows() < params.patch || plane.cols() < params.patch)
    fail(Errc::kImageTooSmall, "image smaller than the nlm patch");

  const int rows = plane.rows();
  const int cols = plane.cols();
  const int hp = params.patch / 2;
  const int hs = params.search / 2;
  const int pad = hp + hs;
  const int prow = rows + 2 * pad;
  const int pcol = cols + 2 * pad;
  std::vector<float> padded(static_cast<std::size_t>(prow) * pcol);
  for (int r = 0; r < prow; ++r)
    for (int c = 0; c < pcol; ++c)
      padded[static_cast<std::size_t>(r) * pcol + c] =
          plane(nlm_detail::mirror(r - pad, rows), nlm_detail::mirror(c - pad, cols));

  const float h = static_cast<float>(params.h_factor * sigma);
  const float inv_h2 = 1.0f / (h * h);
  const float bias = static_cast<float>(2.0 * sigma * sigma);
  const float inv_area = 1.0f / static_cast<float>(params.patch * params.patch);
  const auto& expf_table = nlm_detail::exp_table();

  ImagePlanar out = make_plane(rows, cols, 0.0f, plane.space());
  constexpr int kBand = 32;
  const int bands = (rows + kBand - 1) / kBand;

  parallel_for(0, static_cast<std::size_t>(bands), [&](std::size_t band) {
    const int r0 = static_cast<int>(band) * kBand;
    const int r1 = std::min(rows, r0 + kBand);
    const int nr = r1 - r0;
    // Squared differences cover the band plus the patch halo.
    const int dr = nr + 2 * hp;
    const int dc = cols + 2 * hp;
    std::vector<float> diff(static_cast<std::size_t>(dr) * dc), hsum(static_cast<std::size_t>(dr) * cols);
    std::vector<float> num(static_cast<std::size_t>(nr) * cols, 0.0f), den(num.size(), 0.0f),
        wmax(num.size(), 0.0f), dist(num.size());

    for (int dy = -hs; dy <= hs; ++dy) {
      for (int dx = -hs; dx <= hs; ++dx) {
        if (dy == 0 && dx == 0) continue;
        for (int y = 0; y < dr; ++y) {
          // padded row of image row (r0 - hp + y) is (r0 - hp + y + pad)
          const float* a = padded.data() + static_cast<std::size_t>(r0 - hp + y + pad) * pcol + (pad - hp);
          const float* b = a + static_cast<std::ptrdiff_t>(dy) * pcol + dx;
          float* d = diff.data() + static_cast<std::size_t>(y) * dc;
          for (int x = 0; x < dc; ++x) {
            const float t = a[x] - b[x];
            d[x] = t * t;
          }
          float* hrow = hsum.data() + static_cast<std::size_t>(y) * cols;
          float s = 0.0f;
          for (int x = 0; x < params.patch; ++x) s += d[x];
          hrow[0] = s;
          for (int x = 1; x < cols; ++x) {
            s += d[x + 2 * hp] - d[x - 1];
            hrow[x] = s;
          }
        }
        // Vertical box sums, recomputed per row from the horizontal sums to
        // keep float error from accumulating down the band.
        for (int y = 0; y < nr; ++y) {
          float* drow = dist.data() + static_cast<std::size_t>(y) * cols;
          const float* h0 = hsum.data() + static_cast<std::size_t>(y) * cols;
          std::copy(h0, h0 + cols, drow);
          for (int t = 1; t < params.patch; ++t) {
            const float* ht = hsum.data() + static_cast<std::size_t>(y + t) * cols;
            for (int x = 0; x < cols; ++x) drow[x] += ht[x];
          }
        }
        for (int y = 0; y < nr; ++y) {
          const float* q = padded.data() + static_cast<std::size_t>(r0 + y + pad + dy) * pcol + pad + dx;
          const std::size_t base = static_cast<std::size_t>(y) * cols;
          for (int x = 0; x < cols; ++x) {
            const float d2 = std::max(dist[base + x] * inv_area - bias, 0.0f);
            const float w = expf_table(d2 * inv_h2);
            num[base + x] += w * q[x];
            den[base + x] += w;
            wmax[base + x] = std::max(wmax[base + x], w);
          }
        }
      }
    }
    for (int y = 0; y < nr; ++y) {
      for (int x = 0; x < cols; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * cols + x;
        const float self = plane(r0 + y, x);
        const float wc = wmax[i] > 0.0f ? wmax[i] : 1.0f;
        out(r0 + y, x) = std::clamp((num[i] + wc * self) / (den[i] + wc), 0.0f, 1.0f);
      }
    }
  });
  return out;
}

inline ImagePlanar nlm(const ImagePlanar& img, double sigma, const NlmParams& params = {}) {
  ImagePlanar out(img.rows(), img.cols(), img.channels(), img.space());
  for (int ch = 0; ch < img.channels(); ++ch) {
    const ImagePlanar den = nlm_plane(img.channel(ch), sigma, params);
    std::ranges::copy(den.plane(0), out.plane(ch).begin());
  }
  return out;
}

}  // namespace nightforge
