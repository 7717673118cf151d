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
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "nightforge/error.hpp"

namespace nightforge {

enum class ColorSpace { kCameraRGB, kXYZ, kLinearSRGB, kEncodedSRGB, kYCbCr, kHSV, kMosaic, kLuma };

constexpr std::string_view to_string(ColorSpace s) {
  switch (s) {
    case ColorSpace::kCameraRGB: return "CameraRGB";
    case ColorSpace::kXYZ: return "XYZ";
    case ColorSpace::kLinearSRGB: return "LinearSRGB";
    case ColorSpace::kEncodedSRGB: return "EncodedSRGB";
    case ColorSpace::kYCbCr: return "YCbCr";
    case ColorSpace::kHSV: return "HSV";
    case ColorSpace::kMosaic: return "Mosaic";
    case ColorSpace::kLuma: return "Luma";
  }
  return "Unknown";
}

// Planar image: each channel is a contiguous rows*cols block.
template <typename T>
class Image {
 public:
  using value_type = T;

  Image() = default;
  Image(int rows, int cols, int channels, ColorSpace space, T fill = T{})
      : rows_(rows), cols_(cols), channels_(channels), space_(space) {
    if (rows < 0 || cols < 0 || channels < 1) fail(Errc::kBadDims, "negative image dimensions");
    data_.assign(static_cast<std::size_t>(rows) * cols * channels, fill);
  }

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  int channels() const noexcept { return channels_; }
  ColorSpace space() const noexcept { return space_; }
  void set_space(ColorSpace s) noexcept { space_ = s; }

  std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(rows_) * cols_; }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(int r, int c, int ch = 0) noexcept { return data_[index(r, c, ch)]; }
  const T& operator()(int r, int c, int ch = 0) const noexcept { return data_[index(r, c, ch)]; }

  std::span<T> plane(int ch) noexcept { return {data_.data() + ch * pixel_count(), pixel_count()}; }
  std::span<const T> plane(int ch) const noexcept {
    return {data_.data() + ch * pixel_count(), pixel_count()};
  }
  std::span<T> row(int ch, int r) noexcept {
    return {data_.data() + ch * pixel_count() + static_cast<std::size_t>(r) * cols_,
            static_cast<std::size_t>(cols_)};
  }
  std::span<const T> row(int ch, int r) const noexcept {
    return {data_.data() + ch * pixel_count() + static_cast<std::size_t>(r) * cols_,
            static_cast<std::size_t>(cols_)};
  }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  bool same_shape(const Image& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_ && channels_ == other.channels_;
  }
  bool same_dims(const Image& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  /// Copies channel `ch` into a new single-plane image.
  Image channel(int ch, ColorSpace space = ColorSpace::kLuma) const {
    Image out(rows_, cols_, 1, space);
    std::ranges::copy(plane(ch), out.data().begin());
    return out;
  }

  bool operator==(const Image& other) const = default;

 private:
  std::size_t index(int r, int c, int ch) const noexcept {
    return static_cast<std::size_t>(ch) * pixel_count() + static_cast<std::size_t>(r) * cols_ + c;
  }

  int rows_ = 0;
  int cols_ = 0;
  int channels_ = 1;
  ColorSpace space_ = ColorSpace::kLuma;
  std::vector<T> data_;
};

using ImagePlanar = Image<float>;

inline ImagePlanar make_plane(int rows, int cols, float fill = 0.0f,
                              ColorSpace space = ColorSpace::kLuma) {
  return ImagePlanar(rows, cols, 1, space, fill);
}

template <typename T>
void clamp_unit(Image<T>& img) {
  for (T& v : img.data()) v = std::clamp(v, T(0), T(1));
}

template <typename T>
bool all_finite(const Image<T>& img) {
  return std::ranges::all_of(img.data(), [](T v) { return std::isfinite(v); });
}

inline void require_same_dims(const ImagePlanar& a, const ImagePlanar& b, std::string_view what) {
  if (!a.same_dims(b)) {
    fail(Errc::kDimMismatch, std::string(what) + ": " + std::to_string(a.rows()) + "x" +
                                 std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                                 "x" + std::to_string(b.cols()));
  }
}

}  // namespace nightforge
