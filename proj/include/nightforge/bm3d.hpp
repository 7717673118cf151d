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
#include <vector>

#include "nightforge/error.hpp"
#include "nightforge/image.hpp"
#include "nightforge/parallel.hpp"

namespace nightforge {

// Block-matching and 3-D collaborative filtering. Two passes: hard
// thresholding in a 2-D DCT x 1-D Haar domain produces a basic estimate,
// which then drives block matching and empirical Wiener shrinkage of the noisy
// groups. Intensities and sigma are on the [0, 1] scale.
struct Bm3dParams {
  int block_size = 8;
  int search_window = 39;  // full width, odd
  int max_matched = 16;    // power of two
  int step = 3;            // reference block stride
  double lambda_hard = 2.7;
  double kaiser_beta = 2.0;
  // Matching thresholds on the mean squared block distance; <= 0 picks the
  // usual sigma-dependent defaults.
  double tau_hard = 0.0;
  double tau_wiener = 0.0;
  int stripe_ref_rows = 8;  // reference rows per work unit; fixed so output ignores thread count

  void validate() const {
    auto bad = [](const char* why) { fail(Errc::kInvalidArgument, why); };
    if (block_size < 2) bad("bm3d block size must be >= 2");
    if (search_window < block_size) bad("bm3d block size must not exceed the search window");
    if (search_window % 2 == 0) bad("bm3d search window must be odd");
    if (max_matched < 1 || (max_matched & (max_matched - 1)) != 0) bad("bm3d max_matched must be a power of two");
    if (step < 1) bad("bm3d step must be >= 1");
    if (!(lambda_hard > 0)) bad("bm3d lambda must be > 0");
    if (stripe_ref_rows < 1) bad("bm3d stripe size must be >= 1");
  }

  double hard_threshold_tau(double sigma) const {
    if (tau_hard > 0) return tau_hard;
    return (sigma * 255.0 > 40.0 ? 5000.0 : 2500.0) / (255.0 * 255.0);
  }
  double wiener_tau(double sigma) const {
    if (tau_wiener > 0) return tau_wiener;
    return (sigma * 255.0 > 40.0 ? 3500.0 : 400.0) / (255.0 * 255.0);
  }
};

namespace bm3d_detail {

struct Match {
  float dist;
  std::uint32_t pos;  // row * cols + col of the block's top-left corner
  bool operator<(const Match& o) const { return dist < o.dist || (dist == o.dist && pos < o.pos); }
};

// Sorted, bounded list of the best matches for one reference block.
class MatchList {
 public:
  explicit MatchList(int capacity = 0) : capacity_(capacity) { items_.reserve(capacity); }

  void offer(Match m) {
    if (static_cast<int>(items_.size()) == capacity_) {
      if (!(m < items_.back())) return;
      items_.pop_back();
    }
    items_.insert(std::upper_bound(items_.begin(), items_.end(), m), m);
  }

  // Largest power-of-two prefix.
  int group_size() const {
    int n = 1;
    while (n * 2 <= static_cast<int>(items_.size())) n *= 2;
    return items_.empty() ? 0 : n;
  }
  const std::vector<Match>& items() const { return items_; }
  void clear() { items_.clear(); }

 private:
  int capacity_;
  std::vector<Match> items_;
};

inline std::vector<int> grid_positions(int extent, int block, int step) {
  std::vector<int> pos;
  const int last = extent - block;
  for (int p = 0; p <= last; p += step) pos.push_back(p);
  if (pos.back() != last) pos.push_back(last);
  return pos;
}

// Orthonormal DCT-II matrix, row k = basis k.
inline std::vector<float> dct_matrix(int k) {
  std::vector<float> c(static_cast<std::size_t>(k) * k);
  const double pi = std::acos(-1.0);
  for (int u = 0; u < k; ++u) {
    const double a = u == 0 ? std::sqrt(1.0 / k) : std::sqrt(2.0 / k);
    for (int n = 0; n < k; ++n) c[u * k + n] = static_cast<float>(a * std::cos(pi * (2 * n + 1) * u / (2.0 * k)));
  }
  return c;
}

inline std::vector<float> kaiser_window(int k, double beta) {
  std::vector<double> w1(k);
  for (int n = 0; n < k; ++n) {
    const double t = k == 1 ? 0.0 : 2.0 * n / (k - 1) - 1.0;
    w1[n] = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - t * t))) / std::cyl_bessel_i(0.0, beta);
  }
  std::vector<float> w(static_cast<std::size_t>(k) * k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) w[i * k + j] = static_cast<float>(w1[i] * w1[j]);
  return w;
}

// out = a * in * b for k x k row-major blocks; loops ordered so the inner one
// runs along contiguous rows.
template <int K>
inline void sandwich(const float* a, const float* in, const float* b, float* out, float* tmp, int k = K) {
  const int n = K > 0 ? K : k;
  std::fill(tmp, tmp + n * n, 0.0f);
  for (int i = 0; i < n; ++i)
    for (int t = 0; t < n; ++t) {
      const float s = a[i * n + t];
      for (int j = 0; j < n; ++j) tmp[i * n + j] += s * in[t * n + j];
    }
  std::fill(out, out + n * n, 0.0f);
  for (int i = 0; i < n; ++i)
    for (int t = 0; t < n; ++t) {
      const float s = tmp[i * n + t];
      for (int j = 0; j < n; ++j) out[i * n + j] += s * b[t * n + j];
    }
}

// Forward: C * in * C^T. Inverse: C^T * in * C. `ct` is C transposed.
inline void dct2(const float* in, float* out, const std::vector<float>& c, const std::vector<float>& ct, int k,
                 bool inverse, float* tmp) {
  const float* a = inverse ? ct.data() : c.data();
  const float* b = inverse ? c.data() : ct.data();
  if (k == 8)
    sandwich<8>(a, in, b, out, tmp);
  else
    sandwich<0>(a, in, b, out, tmp, k);
}

inline std::vector<float> transposed(const std::vector<float>& m, int k) {
  std::vector<float> t(m.size());
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) t[j * k + i] = m[i * k + j];
  return t;
}

// Orthonormal Haar along the group axis. `group` holds n blocks of `len`
// coefficients; n is a power of two. Index 0 ends up as the group mean term.
inline void haar(float* group, int n, int len, bool inverse, std::vector<float>& tmp) {
  if (n < 2) return;
  constexpr float kInvSqrt2 = 0.70710678118654752f;
  tmp.resize(static_cast<std::size_t>(n) * len);
  if (!inverse) {
    for (int size = n; size >= 2; size /= 2) {
      const int half = size / 2;
      for (int i = 0; i < half; ++i) {
        const float* a = group + (2 * i) * len;
        const float* b = group + (2 * i + 1) * len;
        float* s = tmp.data() + i * len;
        float* d = tmp.data() + (half + i) * len;
        for (int t = 0; t < len; ++t) {
          s[t] = (a[t] + b[t]) * kInvSqrt2;
          d[t] = (a[t] - b[t]) * kInvSqrt2;
        }
      }
      std::copy(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(size) * len, group);
    }
  } else {
    for (int size = 2; size <= n; size *= 2) {
      const int half = size / 2;
      for (int i = 0; i < half; ++i) {
        const float* s = group + i * len;
        const float* d = group + (half + i) * len;
        float* a = tmp.data() + (2 * i) * len;
        float* b = tmp.data() + (2 * i + 1) * len;
        for (int t = 0; t < len; ++t) {
          a[t] = (s[t] + d[t]) * kInvSqrt2;
          b[t] = (s[t] - d[t]) * kInvSqrt2;
        }
      }
      std::copy(tmp.begin(), tmp.begin() + static_cast<std::ptrdiff_t>(size) * len, group);
    }
  }
}

// Finds, for every reference block in one reference row, the closest blocks
// of `guide` within the search window whose mean squared distance is < tau.
inline void match_row(const ImagePlanar& guide, int ref_row, const std::vector<int>& ref_cols, int block,
                      int half, float tau, std::vector<MatchList>& lists, std::vector<float>& colsum,
                      std::vector<float>& prefix) {
  const int rows = guide.rows();
  const int cols = guide.cols();
  const auto p = guide.plane(0);
  const float norm = 1.0f / static_cast<float>(block * block);
  for (auto& l : lists) l.clear();
  colsum.assign(cols, 0.0f);
  prefix.assign(cols + 1, 0.0f);

  const int y_lo = std::max(0, ref_row - half);
  const int y_hi = std::min(rows - block, ref_row + half);
  for (int y = y_lo; y <= y_hi; ++y) {
    for (int dx = -half; dx <= half; ++dx) {
      // Columns x of the reference band whose shifted partner x + dx exists.
      const int x_lo = std::max(0, -dx);
      const int x_hi = std::min(cols, cols - dx);
      std::fill(colsum.begin(), colsum.end(), 0.0f);
      for (int t = 0; t < block; ++t) {
        const float* a = p.data() + static_cast<std::size_t>(ref_row + t) * cols;
        const float* b = p.data() + static_cast<std::size_t>(y + t) * cols + dx;
        for (int x = x_lo; x < x_hi; ++x) {
          const float d = a[x] - b[x];
          colsum[x] += d * d;
        }
      }
      prefix[0] = 0.0f;
      for (int x = 0; x < cols; ++x) prefix[x + 1] = prefix[x] + colsum[x];
      for (std::size_t r = 0; r < ref_cols.size(); ++r) {
        const int j = ref_cols[r];
        const int cand = j + dx;
        if (cand < 0 || cand > cols - block) continue;
        const float dist = (prefix[j + block] - prefix[j]) * norm;
        if (dist < tau || (y == ref_row && dx == 0))
          lists[r].offer({y == ref_row && dx == 0 ? 0.0f : dist,
                          static_cast<std::uint32_t>(y) * static_cast<std::uint32_t>(cols) + cand});
      }
    }
  }
}

struct StripeAccumulator {
  int row0 = 0;
  int rows = 0;
  int cols = 0;
  std::vector<double> num, den;  // double: hundreds of overlapping blocks land on each pixel

  void init(int r0, int r1, int c) {
    row0 = r0;
    rows = r1 - r0;
    cols = c;
    num.assign(static_cast<std::size_t>(rows) * cols, 0.0);
    den.assign(static_cast<std::size_t>(rows) * cols, 0.0);
  }

  void add_block(int r, int c, const float* block, int k, float weight, const std::vector<float>& window) {
    for (int i = 0; i < k; ++i) {
      double* nrow = num.data() + static_cast<std::size_t>(r + i - row0) * cols + c;
      double* drow = den.data() + static_cast<std::size_t>(r + i - row0) * cols + c;
      for (int j = 0; j < k; ++j) {
        const double w = static_cast<double>(weight) * window[i * k + j];
        nrow[j] += w * block[i * k + j];
        drow[j] += w;
      }
    }
  }
};

enum class Pass { kHard, kWiener };

// One BM3D pass over a single plane. `basic` is the guide for the Wiener
// pass and ignored in the hard pass.
inline ImagePlanar run_pass(const ImagePlanar& noisy, const ImagePlanar* basic, double sigma, const Bm3dParams& prm,
                            Pass pass) {
  const int rows = noisy.rows();
  const int cols = noisy.cols();
  const int k = prm.block_size;
  const int kk = k * k;
  const int half = prm.search_window / 2;
  const auto ref_rows = grid_positions(rows, k, prm.step);
  const auto ref_cols = grid_positions(cols, k, prm.step);
  const auto dct = dct_matrix(k);
  const auto dct_t = transposed(dct, k);
  const auto window = kaiser_window(k, prm.kaiser_beta);
  const ImagePlanar& guide = pass == Pass::kHard ? noisy : *basic;
  const float tau =
      static_cast<float>(pass == Pass::kHard ? prm.hard_threshold_tau(sigma) : prm.wiener_tau(sigma));
  const float threshold = static_cast<float>(prm.lambda_hard * sigma);
  const float sigma2 = static_cast<float>(sigma * sigma);

  const std::size_t n_stripes = (ref_rows.size() + prm.stripe_ref_rows - 1) / prm.stripe_ref_rows;
  std::vector<StripeAccumulator> stripes(n_stripes);

  parallel_for(0, n_stripes, [&](std::size_t s) {
    const std::size_t first = s * prm.stripe_ref_rows;
    const std::size_t last = std::min(ref_rows.size(), first + prm.stripe_ref_rows);
    StripeAccumulator& acc = stripes[s];
    acc.init(std::max(0, ref_rows[first] - half), std::min(rows, ref_rows[last - 1] + half + k), cols);

    std::vector<MatchList> lists(ref_cols.size(), MatchList(prm.max_matched));
    std::vector<float> colsum, prefix, tmp(kk), haar_tmp;
    std::vector<float> group_noisy(static_cast<std::size_t>(prm.max_matched) * kk);
    std::vector<float> group_basic(group_noisy.size());
    std::vector<float> block(kk), out_block(kk);

    auto load_group = [&](const ImagePlanar& src, const std::vector<Match>& m, int n, std::vector<float>& g) {
      const auto data = src.plane(0);
      for (int b = 0; b < n; ++b) {
        const int r = static_cast<int>(m[b].pos / cols);
        const int c = static_cast<int>(m[b].pos % cols);
        for (int i = 0; i < k; ++i)
          for (int j = 0; j < k; ++j) block[i * k + j] = data[static_cast<std::size_t>(r + i) * cols + c + j];
        dct2(block.data(), g.data() + static_cast<std::size_t>(b) * kk, dct, dct_t, k, false, tmp.data());
      }
      haar(g.data(), n, kk, false, haar_tmp);
    };

    for (std::size_t ri = first; ri < last; ++ri) {
      const int i = ref_rows[ri];
      match_row(guide, i, ref_cols, k, half, tau, lists, colsum, prefix);
      for (std::size_t rj = 0; rj < ref_cols.size(); ++rj) {
        const auto& matches = lists[rj].items();
        const int n = lists[rj].group_size();
        load_group(noisy, matches, n, group_noisy);
        float weight;
        if (pass == Pass::kHard) {
          int retained = 1;  // the group DC term is always kept
          for (int t = 1; t < n * kk; ++t) {
            if (std::abs(group_noisy[t]) > threshold)
              ++retained;
            else
              group_noisy[t] = 0.0f;
          }
          weight = 1.0f / (sigma2 * static_cast<float>(retained));
        } else {
          load_group(guide, matches, n, group_basic);
          float energy = 1.0f;  // DC passes with unit gain
          for (int t = 1; t < n * kk; ++t) {
            const float b2 = group_basic[t] * group_basic[t];
            const float shrink = b2 / (b2 + sigma2);
            group_noisy[t] *= shrink;
            energy += shrink * shrink;
          }
          weight = 1.0f / (sigma2 * energy);
        }
        haar(group_noisy.data(), n, kk, true, haar_tmp);
        for (int b = 0; b < n; ++b) {
          dct2(group_noisy.data() + static_cast<std::size_t>(b) * kk, out_block.data(), dct, dct_t, k, true,
               tmp.data());
          acc.add_block(static_cast<int>(matches[b].pos / cols), static_cast<int>(matches[b].pos % cols),
                        out_block.data(), k, weight, window);
        }
      }
    }
  });

  // Merge in stripe order so the sum order never depends on scheduling.
  std::vector<double> num(noisy.pixel_count(), 0.0), den(noisy.pixel_count(), 0.0);
  for (const auto& acc : stripes) {
    const std::size_t offset = static_cast<std::size_t>(acc.row0) * cols;
    for (std::size_t t = 0; t < acc.num.size(); ++t) {
      num[offset + t] += acc.num[t];
      den[offset + t] += acc.den[t];
    }
  }
  ImagePlanar out = make_plane(rows, cols, 0.0f, noisy.space());
  auto dst = out.data();
  const auto src = noisy.plane(0);
  for (std::size_t t = 0; t < dst.size(); ++t)
    dst[t] = den[t] > 0.0 ? static_cast<float>(std::clamp(num[t] / den[t], 0.0, 1.0)) : src[t];
  return out;
}

}  // namespace bm3d_detail

/// Two-pass BM3D of a single plane.
inline ImagePlanar bm3d_plane(const ImagePlanar& plane, double sigma, const Bm3dParams& params = {}) {
  params.validate();
  if (plane.channels() != 1) fail(Errc::kInvalidArgument, "bm3d_plane needs a single plane");
  if (!(sigma > 0.0)) fail(Errc::kInvalidArgument, "bm3d sigma must be > 0");
  if (plane.rows() < params.block_size || plane.cols() < params.block_size)
    fail(Errc::kImageTooSmall, "image smaller than the bm3d block size");
  const ImagePlanar basic = bm3d_detail::run_pass(plane, nullptr, sigma, params, bm3d_detail::Pass::kHard);
  return bm3d_detail::run_pass(plane, &basic, sigma, params, bm3d_detail::Pass::kWiener);
}

/// BM3D of every channel independently with the same sigma.
inline ImagePlanar bm3d(const ImagePlanar& img, double sigma, const Bm3dParams& params = {}) {
  ImagePlanar out(img.rows(), img.cols(), img.channels(), img.space());
  for (int ch = 0; ch < img.channels(); ++ch) {
    const ImagePlanar den = bm3d_plane(img.channel(ch), sigma, params);
    std::ranges::copy(den.plane(0), out.plane(ch).begin());
  }
  return out;
}

}  // namespace nightforge
