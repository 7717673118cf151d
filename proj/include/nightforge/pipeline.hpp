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
#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nightforge/colorspace.hpp"
#include "nightforge/config.hpp"
#include "nightforge/demosaic.hpp"
#include "nightforge/denoise.hpp"
#include "nightforge/error.hpp"
#include "nightforge/frame_io.hpp"
#include "nightforge/illuminant.hpp"
#include "nightforge/local_contrast.hpp"
#include "nightforge/report.hpp"
#include "nightforge/tone.hpp"

namespace nightforge {

inline constexpr std::array<std::string_view, 16> kStageOrder{
    "normalize",      "demosaic",         "gray_world", "color_transform", "local_contrast", "contrast_stretch",
    "saturation",     "black_point",      "gamma",      "sharpen",         "quantize",       "resize",
    "denoise",        "blend",            "grayness_index", "orientation"};

inline constexpr int kPreliminaryStageCount = 4;

/// Called after every stage with its report and the image it produced. For
/// local_contrast and contrast_stretch the image is the luma plane.
using StageObserver = std::function<void(const StageReport&, const ImagePlanar&)>;

struct PipelineResult {
  ImagePlanar image;
  std::vector<StageReport> reports;
  Illuminant gray_world;
  Illuminant grayness_index;
  NoiseClass noise;
  double mean_luma = 0.0;
  double lcc_gamma = 1.0;
  StretchRange stretch;
};

namespace pipeline_detail {

inline Histogram256 luma_histogram(const ImagePlanar& img) {
  return img.channels() == 1 ? histogram(img) : histogram(luma(img));
}

class StageRunner {
 public:
  StageRunner(const PipelineConfig& cfg, const StageObserver& observer, std::vector<StageReport>& reports)
      : cfg_(cfg), observer_(observer), reports_(reports) {}

  // Runs `fn` as stage `index`; `input` (may be null) feeds the "before"
  // histogram, fn returns the stage output. Disabled stages pass `input`
  // through untouched.
  template <typename Fn>
  ImagePlanar run(int index, bool enabled, const ImagePlanar* input, Fn&& fn) {
    StageReport report;
    report.name = std::string(kStageOrder[static_cast<std::size_t>(index)]);
    report.group = index < kPreliminaryStageCount ? StageGroup::kPreliminary : StageGroup::kLowLight;
    report.skipped = !enabled;
    if (cfg_.capture_histograms && input) report.hist_before = luma_histogram(*input);

    ImagePlanar out;
    const auto start = std::chrono::steady_clock::now();
    try {
      out = enabled ? fn() : *input;
    } catch (const StageError&) {
      throw;
    } catch (const Error& e) {
      throw StageError(report.name, e);
    }
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (cfg_.capture_histograms) report.hist_after = luma_histogram(out);
    reports_.push_back(report);
    if (observer_) observer_(reports_.back(), out);
    return out;
  }

 private:
  const PipelineConfig& cfg_;
  const StageObserver& observer_;
  std::vector<StageReport>& reports_;
};

inline ImagePlanar with_luma(const ImagePlanar& ycbcr, const ImagePlanar& y) {
  ImagePlanar out = ycbcr;
  std::ranges::copy(y.plane(0), out.plane(0).begin());
  return out;
}

}  // namespace pipeline_detail

/// Renders one RAW frame. Stage failures surface as StageError naming the stage.
inline PipelineResult run_pipeline(const RawFrame& frame, const PipelineConfig& cfg = {},
                                   const StageObserver& observer = {}) {
  using pipeline_detail::with_luma;
  cfg.validate();
  try {
    frame.validate();
  } catch (const Error& e) {
    throw StageError("normalize", e);
  }

  PipelineResult res;
  pipeline_detail::StageRunner stage(cfg, observer, res.reports);
  const StageToggles& on = cfg.stages;
  const FrameMetadata& meta = frame.meta;

  // Preliminary steps.
  ImagePlanar img = stage.run(0, true, nullptr, [&] { return normalize_raw(frame); });
  img = stage.run(1, true, &img, [&] { return demosaic_bilinear(img, CfaLayout::from(meta)); });
  img = stage.run(2, true, &img, [&] {
    res.gray_world = gray_world_estimate(img);
    return apply_gains(img, res.gray_world);
  });
  img = stage.run(3, true, &img, [&] { return camera_to_srgb(img, meta); });

  // Low-light steps. LCC, stretch and saturation share the pre-correction
  // image: the saturation step rebuilds RGB from it around the final luma.
  const ImagePlanar rgb_before = img;
  const ImagePlanar ycc_before = on.local_contrast || on.contrast_stretch || on.saturation ? rgb_to_ycbcr(img)
                                                                                           : ImagePlanar{};
  const ImagePlanar y_before = on.local_contrast || on.contrast_stretch || on.saturation
                                   ? ImagePlanar(ycc_before.channel(0))
                                   : luma(img);

  ImagePlanar y_lcc = stage.run(4, on.local_contrast, &y_before, [&] {
    const double sigma = cfg.lcc_mask_sigma > 0 ? cfg.lcc_mask_sigma
                                                : default_mask_sigma(img.rows(), img.cols(), cfg.mask_sigma_divisor);
    LccResult lcc = local_contrast_correct(y_before, sigma);
    res.mean_luma = lcc.mean_y;
    res.lcc_gamma = lcc.gamma;
    return std::move(lcc.y_out);
  });

  ImagePlanar y_hat = stage.run(5, on.contrast_stretch, &y_lcc, [&] {
    res.stretch = stretch_range(ycc_before, with_luma(ycc_before, y_lcc), cfg.dark, cfg.stretch);
    return apply_stretch(y_lcc, res.stretch);
  });

  const bool luma_changed = on.local_contrast || on.contrast_stretch;
  img = stage.run(6, on.saturation || luma_changed, &rgb_before, [&] {
    if (on.saturation) return saturation_enhance(rgb_before, y_before, y_hat, cfg.saturation);
    ImagePlanar rgb = ycbcr_to_rgb(with_luma(ycc_before, y_hat), rgb_before.space());
    clamp_unit(rgb);
    return rgb;
  });
  if (!on.saturation) res.reports.back().skipped = true;

  img = stage.run(7, on.black_point, &img,
                  [&] { return black_point_correct(img, cfg.black_point_percentile, cfg.black_point_mode); });
  img = stage.run(8, on.gamma, &img, [&] { return gamma_encode(img, cfg.gamma_exponent); });
  img = stage.run(9, on.sharpen, &img, [&] { return unsharp_mask(img, cfg.sharpen_sigma, cfg.sharpen_amount); });
  img = stage.run(10, on.quantize, &img, [&] { return quantize_8bit(img); });
  img = stage.run(11, on.resize, &img, [&] { return resize_to_output(img, meta, cfg.output, cfg.interpolation); });

  const ImagePlanar noisy = img;
  const ImagePlanar denoised = stage.run(12, on.denoise, &noisy, [&] {
    res.noise = classify_noise(meta.noise_profile, cfg.noise);
    return denoise(noisy, res.noise.sigma, cfg.denoise);
  });
  img = stage.run(13, on.blend, &denoised, [&] { return blend_masked(denoised, noisy, cfg.blend); });
  img = stage.run(14, on.grayness_index, &img, [&] {
    res.grayness_index = grayness_index_estimate(denoised, cfg.grayness);
    return apply_gains(img, res.grayness_index);
  });
  img = stage.run(15, on.orientation, &img, [&] { return apply_orientation(img, meta.orientation); });

  res.image = std::move(img);
  return res;
}

/// Loads, renders and writes one frame. Load and save failures are reported
/// under the frame_io stage.
inline PipelineResult render_file(const std::filesystem::path& png, const std::filesystem::path& json,
                                  const std::filesystem::path& jpeg_out, const PipelineConfig& cfg = {},
                                  const StageObserver& observer = {}) {
  RawFrame frame;
  try {
    frame = load_raw(png, json);
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError("frame_io", e);
  }
  PipelineResult res = run_pipeline(frame, cfg, observer);
  try {
    save_jpeg(res.image, jpeg_out, cfg.output.jpeg_quality);
  } catch (const Error& e) {
    throw StageError("frame_io", e);
  }
  return res;
}

}  // namespace nightforge
