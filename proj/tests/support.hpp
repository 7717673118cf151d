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

// Helpers shared by the unit tests.

#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "nightforge/error.hpp"
#include "nightforge/image.hpp"
#include "nightforge/metadata.hpp"

// Expects `stmt` to throw nightforge::Error carrying `errc`.
#define EXPECT_ERRC(stmt, errc)                                                       \
  do {                                                                                \
    try {                                                                             \
      stmt;                                                                           \
      ADD_FAILURE() << "expected " << nightforge::to_string(errc) << ", nothing thrown"; \
    } catch (const nightforge::Error& e_) {                                           \
      EXPECT_EQ(e_.code(), errc) << e_.what();                                        \
    }                                                                                 \
  } while (0)

namespace nftest {

using nightforge::ColorSpace;
using nightforge::ImagePlanar;

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("nightforge_test_" + std::to_string(stamp) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline ImagePlanar random_image(int rows, int cols, int channels, std::uint32_t seed, float lo = 0.0f,
                                float hi = 1.0f, ColorSpace space = ColorSpace::kLinearSRGB) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> u(lo, hi);
  ImagePlanar img(rows, cols, channels, space);
  for (float& v : img.data()) v = u(rng);
  return img;
}

inline double max_abs_diff(const ImagePlanar& a, const ImagePlanar& b) {
  double m = 0.0;
  const auto da = a.data(), db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) m = std::max(m, std::abs(static_cast<double>(da[i]) - db[i]));
  return m;
}

// Peak signal-to-noise ratio for [0,1] data.
inline double psnr(const ImagePlanar& ref, const ImagePlanar& test) {
  double se = 0.0;
  const auto a = ref.data(), b = test.data();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    se += d * d;
  }
  const double mse = se / static_cast<double>(a.size());
  return 10.0 * std::log10(1.0 / mse);
}

inline nightforge::FrameMetadata identity_metadata() {
  nightforge::FrameMetadata m;
  m.black_level = 0;
  m.white_level = 65535;
  m.color_matrix_1 = nightforge::Mat3::identity();
  m.noise_profile = {0.01};
  return m;
}

}  // namespace nftest
