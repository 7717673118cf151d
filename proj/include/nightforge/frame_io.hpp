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
#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <jpeglib.h>
#include <png.h>

#include <nlohmann/json.hpp>

#include "nightforge/error.hpp"
#include "nightforge/image.hpp"
#include "nightforge/metadata.hpp"
#include "nightforge/parallel.hpp"

namespace nightforge {

namespace io_detail {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct PngErrorState {
  char message[256] = "libpng error";
};

inline void png_error_fn(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
  std::snprintf(state->message, sizeof(state->message), "%s", msg);
  png_longjmp(png, 1);
}

inline void png_warning_fn(png_structp, png_const_charp) {}

struct JpegErrorState {
  jpeg_error_mgr mgr;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX] = "libjpeg error";
};

inline void jpeg_error_fn(j_common_ptr cinfo) {
  auto* state = reinterpret_cast<JpegErrorState*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, state->message);
  std::longjmp(state->jump, 1);
}

inline std::uint8_t to_u8(float v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
}

}  // namespace io_detail

/// Reads a single-channel 16-bit PNG. Rows come back in host byte order.
inline RawFrame read_png16(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) fail(Errc::kFileNotFound, path.string());
  io_detail::FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) fail(Errc::kIoError, "cannot open " + path.string());

  png_byte signature[8];
  if (std::fread(signature, 1, 8, file.get()) != 8 || png_sig_cmp(signature, 0, 8) != 0)
    fail(Errc::kMalformedPng, path.string() + " is not a PNG file");

  io_detail::PngErrorState state;
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, &state, io_detail::png_error_fn, io_detail::png_warning_fn);
  if (!png) fail(Errc::kIoError, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  RawFrame frame;
  std::vector<png_bytep> row_ptrs;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(Errc::kMalformedPng, path.string() + ": " + state.message);
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);
  const auto width = png_get_image_width(png, info);
  const auto height = png_get_image_height(png, info);
  if (bit_depth != 16 || color_type != PNG_COLOR_TYPE_GRAY) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(Errc::kMalformedPng, path.string() + ": expected 16-bit single-channel PNG, got depth " +
                                  std::to_string(bit_depth) + " color type " + std::to_string(color_type));
  }
  if (std::endian::native == std::endian::little) png_set_swap(png);
  frame.rows = static_cast<int>(height);
  frame.cols = static_cast<int>(width);
  frame.pixels.resize(static_cast<std::size_t>(width) * height);
  row_ptrs.resize(height);
  for (png_uint_32 r = 0; r < height; ++r)
    row_ptrs[r] = reinterpret_cast<png_bytep>(frame.pixels.data() + static_cast<std::size_t>(r) * width);
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return frame;
}

inline void write_png16(const std::filesystem::path& path, int rows, int cols,
                        const std::vector<std::uint16_t>& pixels) {
  if (pixels.size() != static_cast<std::size_t>(rows) * cols) fail(Errc::kBadDims, "pixel buffer size mismatch");
  io_detail::FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) fail(Errc::kIoError, "cannot open " + path.string() + " for writing");
  io_detail::PngErrorState state;
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, &state, io_detail::png_error_fn, io_detail::png_warning_fn);
  if (!png) fail(Errc::kIoError, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  std::vector<png_bytep> row_ptrs(rows);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(Errc::kIoError, path.string() + ": " + state.message);
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, cols, rows, 16, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 1);
  png_write_info(png, info);
  if (std::endian::native == std::endian::little) png_set_swap(png);
  for (int r = 0; r < rows; ++r)
    row_ptrs[r] = reinterpret_cast<png_bytep>(const_cast<std::uint16_t*>(pixels.data()) +
                                              static_cast<std::size_t>(r) * cols);
  png_write_image(png, row_ptrs.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

inline FrameMetadata read_metadata(const std::filesystem::path& path, const MetadataConverter& converter = {}) {
  if (!std::filesystem::exists(path)) fail(Errc::kFileNotFound, path.string());
  std::ifstream in(path);
  if (!in) fail(Errc::kIoError, "cannot open " + path.string());
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded()) fail(Errc::kMalformedMetadata, path.string() + " is not valid JSON");
  return parse_metadata(converter ? converter(doc) : doc);
}

inline void write_metadata(const std::filesystem::path& path, const FrameMetadata& meta) {
  std::ofstream out(path);
  if (!out) fail(Errc::kIoError, "cannot open " + path.string() + " for writing");
  out << to_json(meta).dump(2) << '\n';
  if (!out) fail(Errc::kIoError, "failed writing " + path.string());
}

/// Loads a RAW frame and its JSON sidecar. Counts above white_level are
/// clipped to it.
inline RawFrame load_raw(const std::filesystem::path& png_path, const std::filesystem::path& json_path,
                         const MetadataConverter& converter = {}) {
  if (!std::filesystem::exists(png_path)) fail(Errc::kFileNotFound, png_path.string());
  if (!std::filesystem::exists(json_path)) fail(Errc::kFileNotFound, json_path.string());
  FrameMetadata meta = read_metadata(json_path, converter);
  RawFrame frame = read_png16(png_path);
  if (frame.rows < 2 || frame.cols < 2 || frame.rows % 2 || frame.cols % 2)
    fail(Errc::kMalformedPng, png_path.string() + ": dimensions must be even and at least 2x2");
  frame.meta = std::move(meta);
  const auto white = static_cast<std::uint16_t>(std::min(65535.0, frame.meta.white_level));
  for (auto& v : frame.pixels) v = std::min(v, white);
  return frame;
}

inline void save_raw(const RawFrame& frame, const std::filesystem::path& png_path,
                     const std::filesystem::path& json_path) {
  frame.validate();
  write_png16(png_path, frame.rows, frame.cols, frame.pixels);
  write_metadata(json_path, frame.meta);
}

/// Baseline JPEG, 4:4:4, values clamped to [0, 1] then rounded to 8 bits.
inline void save_jpeg(const ImagePlanar& img, const std::filesystem::path& path, int quality = 100) {
  if (quality < 1 || quality > 100) fail(Errc::kInvalidArgument, "jpeg quality must lie in [1, 100]");
  if (img.channels() != 1 && img.channels() != 3) fail(Errc::kInvalidArgument, "jpeg needs 1 or 3 channels");
  if (img.empty()) fail(Errc::kInvalidArgument, "cannot encode an empty image");
  io_detail::FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) fail(Errc::kIoError, "cannot open " + path.string() + " for writing");

  const int channels = img.channels();
  std::vector<std::uint8_t> row(static_cast<std::size_t>(img.cols()) * channels);
  jpeg_compress_struct cinfo{};
  io_detail::JpegErrorState err;
  cinfo.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = io_detail::jpeg_error_fn;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    fail(Errc::kIoError, path.string() + ": " + err.message);
  }
  jpeg_create_compress(&cinfo);
  jpeg_stdio_dest(&cinfo, file.get());
  cinfo.image_width = static_cast<JDIMENSION>(img.cols());
  cinfo.image_height = static_cast<JDIMENSION>(img.rows());
  cinfo.input_components = channels;
  cinfo.in_color_space = channels == 3 ? JCS_RGB : JCS_GRAYSCALE;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  for (int c = 0; c < cinfo.num_components; ++c) {
    cinfo.comp_info[c].h_samp_factor = 1;
    cinfo.comp_info[c].v_samp_factor = 1;
  }
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    const int r = static_cast<int>(cinfo.next_scanline);
    for (int c = 0; c < img.cols(); ++c)
      for (int ch = 0; ch < channels; ++ch) row[static_cast<std::size_t>(c) * channels + ch] = io_detail::to_u8(img(r, c, ch));
    JSAMPROW ptr = row.data();
    jpeg_write_scanlines(&cinfo, &ptr, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  if (std::fflush(file.get()) != 0) fail(Errc::kIoError, "failed writing " + path.string());
}

inline ImagePlanar load_jpeg(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) fail(Errc::kFileNotFound, path.string());
  io_detail::FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) fail(Errc::kIoError, "cannot open " + path.string());
  jpeg_decompress_struct cinfo{};
  io_detail::JpegErrorState err;
  cinfo.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = io_detail::jpeg_error_fn;
  ImagePlanar out;
  std::vector<std::uint8_t> row;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    fail(Errc::kIoError, path.string() + ": " + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, file.get());
  jpeg_read_header(&cinfo, TRUE);
  jpeg_start_decompress(&cinfo);
  const int channels = cinfo.output_components;
  out = ImagePlanar(static_cast<int>(cinfo.output_height), static_cast<int>(cinfo.output_width), channels,
                    channels == 3 ? ColorSpace::kEncodedSRGB : ColorSpace::kLuma);
  row.resize(static_cast<std::size_t>(cinfo.output_width) * channels);
  while (cinfo.output_scanline < cinfo.output_height) {
    const int r = static_cast<int>(cinfo.output_scanline);
    JSAMPROW ptr = row.data();
    jpeg_read_scanlines(&cinfo, &ptr, 1);
    for (int c = 0; c < out.cols(); ++c)
      for (int ch = 0; ch < channels; ++ch) out(r, c, ch) = row[static_cast<std::size_t>(c) * channels + ch] / 255.0f;
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return out;
}

// ---------------------------------------------------------------------------
// Geometry

enum class Interpolation { kBicubic, kBilinear };

namespace io_detail {

struct Taps {
  std::vector<int> index;     // n_out * 4
  std::vector<float> weight;  // n_out * 4
};

inline double cubic_weight(double x) {
  constexpr double a = -0.5;
  x = std::abs(x);
  if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
  return 0.0;
}

// Pixel centres are aligned: src = (dst + 0.5) * scale - 0.5; edges clamp.
inline Taps make_taps(int n_in, int n_out, Interpolation interp) {
  Taps t;
  t.index.resize(static_cast<std::size_t>(n_out) * 4);
  t.weight.resize(t.index.size());
  const double scale = static_cast<double>(n_in) / n_out;
  for (int o = 0; o < n_out; ++o) {
    const double src = (o + 0.5) * scale - 0.5;
    const int base = static_cast<int>(std::floor(src));
    const double frac = src - base;
    double w[4];
    if (interp == Interpolation::kBicubic) {
      for (int k = 0; k < 4; ++k) w[k] = cubic_weight(frac - (k - 1));
    } else {
      w[0] = 0.0;
      w[1] = 1.0 - frac;
      w[2] = frac;
      w[3] = 0.0;
    }
    for (int k = 0; k < 4; ++k) {
      t.index[o * 4 + k] = std::clamp(base + k - 1, 0, n_in - 1);
      t.weight[o * 4 + k] = static_cast<float>(w[k]);
    }
  }
  return t;
}

}  // namespace io_detail

/// Separable bicubic (Keys, a = -0.5) or bilinear resampling to exact
/// dimensions.
inline ImagePlanar resize(const ImagePlanar& img, int out_rows, int out_cols,
                          Interpolation interp = Interpolation::kBicubic) {
  if (out_rows < 1 || out_cols < 1) fail(Errc::kBadDims, "resize target must be at least 1x1");
  if (img.rows() < 1 || img.cols() < 1) fail(Errc::kBadDims, "cannot resize an empty image");
  const auto tx = io_detail::make_taps(img.cols(), out_cols, interp);
  const auto ty = io_detail::make_taps(img.rows(), out_rows, interp);
  ImagePlanar out(out_rows, out_cols, img.channels(), img.space());
  for (int ch = 0; ch < img.channels(); ++ch) {
    ImagePlanar horiz = make_plane(img.rows(), out_cols);
    parallel_for(0, static_cast<std::size_t>(img.rows()), [&](std::size_t r) {
      const auto src = img.row(ch, static_cast<int>(r));
      auto dst = horiz.row(0, static_cast<int>(r));
      for (int c = 0; c < out_cols; ++c) {
        float s = 0.0f;
        for (int k = 0; k < 4; ++k) s += tx.weight[c * 4 + k] * src[tx.index[c * 4 + k]];
        dst[c] = s;
      }
    });
    parallel_for(0, static_cast<std::size_t>(out_rows), [&](std::size_t r) {
      auto dst = out.row(ch, static_cast<int>(r));
      std::fill(dst.begin(), dst.end(), 0.0f);
      for (int k = 0; k < 4; ++k) {
        const float w = ty.weight[r * 4 + k];
        if (w == 0.0f) continue;
        const auto src = horiz.row(0, ty.index[r * 4 + k]);
        for (int c = 0; c < out_cols; ++c) dst[c] += w * src[c];
      }
    });
  }
  return out;
}

/// Target dimensions chosen from the aspect the frame will have after
/// orientation; returned as (rows, cols) before orientation is applied.
inline Size2 output_dims_before_orientation(int rows, int cols, Orientation o, const OutputSpec& spec) {
  const bool swap = swaps_axes(o);
  const int upright_w = swap ? rows : cols;
  const int upright_h = swap ? cols : rows;
  const Size2 target = upright_w >= upright_h ? spec.landscape_size : spec.portrait_size;
  return swap ? Size2{target.height, target.width} : target;  // {width=cols, height=rows}
}

inline ImagePlanar resize_to_output(const ImagePlanar& img, const FrameMetadata& meta, const OutputSpec& spec,
                                    Interpolation interp = Interpolation::kBicubic) {
  if (img.rows() < 2 || img.cols() < 2) fail(Errc::kBadDims, "resize input must be at least 2x2");
  const Size2 dims = output_dims_before_orientation(img.rows(), img.cols(), meta.orientation, spec);
  ImagePlanar out = resize(img, dims.height, dims.width, interp);
  clamp_unit(out);
  return out;
}

/// Lossless rotation by a multiple of 90 degrees (clockwise for 90).
inline ImagePlanar apply_orientation(const ImagePlanar& img, Orientation o) {
  if (o == Orientation::kLandscape0) return img;
  const int rows = img.rows();
  const int cols = img.cols();
  const bool swap = swaps_axes(o);
  ImagePlanar out(swap ? cols : rows, swap ? rows : cols, img.channels(), img.space());
  for (int ch = 0; ch < img.channels(); ++ch) {
    for (int r = 0; r < out.rows(); ++r) {
      for (int c = 0; c < out.cols(); ++c) {
        int sr = r, sc = c;
        switch (o) {
          case Orientation::kPortrait90CW: sr = rows - 1 - c; sc = r; break;
          case Orientation::kPortrait90CCW: sr = c; sc = cols - 1 - r; break;
          case Orientation::kRotate180: sr = rows - 1 - r; sc = cols - 1 - c; break;
          case Orientation::kLandscape0: break;
        }
        out(r, c, ch) = img(sr, sc, ch);
      }
    }
  }
  return out;
}

}  // namespace nightforge
