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

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "nightforge/denoise.hpp"
#include "nightforge/error.hpp"
#include "nightforge/frame_io.hpp"
#include "nightforge/illuminant.hpp"
#include "nightforge/metadata.hpp"
#include "nightforge/tone.hpp"

namespace nightforge {

struct StageToggles {
  bool local_contrast = true;
  bool contrast_stretch = true;
  bool saturation = true;
  bool black_point = true;
  bool gamma = true;
  bool sharpen = true;
  bool quantize = true;
  bool resize = true;
  bool denoise = true;
  bool blend = true;
  bool grayness_index = true;
  bool orientation = true;

  void set_all(bool on) {
    local_contrast = contrast_stretch = saturation = black_point = gamma = sharpen = on;
    quantize = resize = denoise = blend = grayness_index = orientation = on;
  }
};

/// Every tunable of the pipeline. Defaults are the reference settings.
struct PipelineConfig {
  OutputSpec output;
  Interpolation interpolation = Interpolation::kBicubic;

  double lcc_mask_sigma = 0.0;  // <= 0: short side / mask_sigma_divisor
  double mask_sigma_divisor = 30.0;

  DarkPixelRule dark;
  StretchParams stretch;
  SaturationVariant saturation = SaturationVariant::kPrinted;
  double black_point_percentile = 20.0;
  BlackPointMode black_point_mode = BlackPointMode::kSubtract;
  double gamma_exponent = 1.0 / 1.4;
  double sharpen_sigma = 1.5;
  double sharpen_amount = 0.5;

  NoiseClassTable noise;
  DenoiseParams denoise;
  BlendParams blend;
  GraynessIndexParams grayness;

  StageToggles stages;
  bool capture_histograms = false;

  void validate() const {
    auto bad = [](const std::string& why) { fail(Errc::kInvalidConfig, why); };
    auto in_unit = [](double v) { return v > 0.0 && v < 1.0; };
    if (output.jpeg_quality < 1 || output.jpeg_quality > 100) bad("output.jpeg_quality must lie in [1, 100]");
    for (const Size2& s : {output.landscape_size, output.portrait_size})
      if (s.width < 8 || s.height < 8) bad("output sizes must be at least 8x8");
    if (!(mask_sigma_divisor > 0)) bad("lcc.mask_sigma_divisor must be > 0");
    if (!in_unit(dark.y_threshold) || !in_unit(dark.cr_threshold)) bad("dark thresholds must lie in (0, 1)");
    if (!(stretch.dark_percent > 0 && stretch.dark_percent <= 100)) bad("stretch.dark_percent must lie in (0, 100]");
    if (!(stretch.low_percentile >= 0 && stretch.low_percentile < stretch.high_percentile &&
          stretch.high_percentile <= 100))
      bad("stretch percentiles must satisfy 0 <= low < high <= 100");
    if (stretch.clip_limit < 0 || stretch.clip_limit > 127) bad("stretch.clip_limit must lie in [0, 127]");
    if (!(black_point_percentile >= 0 && black_point_percentile <= 100))
      bad("black_point.percentile must lie in [0, 100]");
    if (!(gamma_exponent > 0)) bad("gamma.exponent must be > 0");
    if (!(sharpen_sigma > 0) || !(sharpen_amount >= 0)) bad("sharpen sigma must be > 0 and amount >= 0");
    if (!(noise.threshold_low < noise.threshold_high)) bad("noise thresholds must be increasing");
    for (double s : noise.sigma)
      if (!(s > 0)) bad("noise sigmas must be > 0");
    if (!(blend.u >= 0 && blend.u <= 1)) bad("blend.u must lie in [0, 1]");
    if (!(grayness.top_fraction > 0 && grayness.top_fraction <= 1)) bad("gi.top_fraction must lie in (0, 1]");
    try {
      denoise.bm3d.validate();
      denoise.nlm.validate();
    } catch (const Error& e) {
      bad(e.what());
    }
  }
};

namespace config_detail {

inline std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// Accepts plain decimals and simple fractions such as "1/1.4".
inline double parse_double(const std::string& key, const std::string& text) {
  auto parse_one = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v))
      fail(Errc::kInvalidConfig, key + ": '" + text + "' is not a number");
    return v;
  };
  const auto slash = text.find('/');
  if (slash == std::string::npos) return parse_one(trim(text));
  const double den = parse_one(trim(text.substr(slash + 1)));
  if (den == 0) fail(Errc::kInvalidConfig, key + ": division by zero");
  return parse_one(trim(text.substr(0, slash))) / den;
}

inline int parse_int(const std::string& key, const std::string& text) {
  int v = 0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) fail(Errc::kInvalidConfig, key + ": '" + text + "' is not an integer");
  return v;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "on" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "off" || text == "0" || text == "no") return false;
  fail(Errc::kInvalidConfig, key + ": '" + text + "' is not a boolean");
}

// Shortest text that parses back to the same double.
inline std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <typename E>
struct EnumNames {
  std::vector<std::pair<E, std::string>> names;

  E parse(const std::string& key, const std::string& text) const {
    for (const auto& [e, n] : names)
      if (n == text) return e;
    std::string options;
    for (const auto& [e, n] : names) options += (options.empty() ? "" : "|") + n;
    fail(Errc::kInvalidConfig, key + ": '" + text + "' is not one of " + options);
  }
  std::string name(E e) const {
    for (const auto& [v, n] : names)
      if (v == e) return n;
    return "?";
  }
};

struct Entry {
  std::string key;
  std::function<std::string(const PipelineConfig&)> get;
  std::function<void(PipelineConfig&, const std::string&)> set;
};

inline Entry real(std::string key, double PipelineConfig::*field) {
  return {key, [field](const PipelineConfig& c) { return fmt(c.*field); },
          [field, key](PipelineConfig& c, const std::string& v) { c.*field = parse_double(key, v); }};
}

template <typename Get>
Entry real_at(std::string key, Get ref) {
  return {key, [ref](const PipelineConfig& c) { return fmt(ref(const_cast<PipelineConfig&>(c))); },
          [ref, key](PipelineConfig& c, const std::string& v) { ref(c) = parse_double(key, v); }};
}

template <typename Get>
Entry integer_at(std::string key, Get ref) {
  return {key, [ref](const PipelineConfig& c) { return std::to_string(ref(const_cast<PipelineConfig&>(c))); },
          [ref, key](PipelineConfig& c, const std::string& v) { ref(c) = parse_int(key, v); }};
}

template <typename Get>
Entry boolean_at(std::string key, Get ref) {
  return {key, [ref](const PipelineConfig& c) { return std::string(ref(const_cast<PipelineConfig&>(c)) ? "on" : "off"); },
          [ref, key](PipelineConfig& c, const std::string& v) { ref(c) = parse_bool(key, v); }};
}

template <typename E, typename Get>
Entry enumeration_at(std::string key, EnumNames<E> names, Get ref) {
  return {key, [ref, names](const PipelineConfig& c) { return names.name(ref(const_cast<PipelineConfig&>(c))); },
          [ref, names, key](PipelineConfig& c, const std::string& v) { ref(c) = names.parse(key, v); }};
}

inline const std::vector<Entry>& entries() {
  using C = PipelineConfig;
  static const std::vector<Entry> table = [] {
    std::vector<Entry> e;
    e.push_back(integer_at("output.landscape_width", [](C& c) -> int& { return c.output.landscape_size.width; }));
    e.push_back(integer_at("output.landscape_height", [](C& c) -> int& { return c.output.landscape_size.height; }));
    e.push_back(integer_at("output.portrait_width", [](C& c) -> int& { return c.output.portrait_size.width; }));
    e.push_back(integer_at("output.portrait_height", [](C& c) -> int& { return c.output.portrait_size.height; }));
    e.push_back(integer_at("output.jpeg_quality", [](C& c) -> int& { return c.output.jpeg_quality; }));
    e.push_back(enumeration_at("resize.interpolation",
                               EnumNames<Interpolation>{{{Interpolation::kBicubic, "bicubic"},
                                                         {Interpolation::kBilinear, "bilinear"}}},
                               [](C& c) -> Interpolation& { return c.interpolation; }));

    e.push_back(real("lcc.mask_sigma", &C::lcc_mask_sigma));
    e.push_back(real("lcc.mask_sigma_divisor", &C::mask_sigma_divisor));

    e.push_back(real_at("dark.y_threshold", [](C& c) -> double& { return c.dark.y_threshold; }));
    e.push_back(real_at("dark.cr_threshold", [](C& c) -> double& { return c.dark.cr_threshold; }));
    e.push_back(enumeration_at("dark.chroma_mode",
                               EnumNames<ChromaMode>{{{ChromaMode::kMagnitude, "magnitude"},
                                                      {ChromaMode::kLiteral, "literal"}}},
                               [](C& c) -> ChromaMode& { return c.dark.mode; }));

    e.push_back(real_at("stretch.dark_percent", [](C& c) -> double& { return c.stretch.dark_percent; }));
    e.push_back(real_at("stretch.low_percentile", [](C& c) -> double& { return c.stretch.low_percentile; }));
    e.push_back(real_at("stretch.high_percentile", [](C& c) -> double& { return c.stretch.high_percentile; }));
    e.push_back(integer_at("stretch.clip_limit", [](C& c) -> int& { return c.stretch.clip_limit; }));

    e.push_back(enumeration_at("saturation.variant",
                               EnumNames<SaturationVariant>{{{SaturationVariant::kPrinted, "printed"},
                                                             {SaturationVariant::kBalanced, "balanced"}}},
                               [](C& c) -> SaturationVariant& { return c.saturation; }));

    e.push_back(real("black_point.percentile", &C::black_point_percentile));
    e.push_back(enumeration_at("black_point.mode",
                               EnumNames<BlackPointMode>{{{BlackPointMode::kSubtract, "subtract"},
                                                          {BlackPointMode::kHardZero, "hard_zero"}}},
                               [](C& c) -> BlackPointMode& { return c.black_point_mode; }));
    e.push_back(real("gamma.exponent", &C::gamma_exponent));
    e.push_back(real("sharpen.sigma", &C::sharpen_sigma));
    e.push_back(real("sharpen.amount", &C::sharpen_amount));

    e.push_back(enumeration_at("denoise.method",
                               EnumNames<DenoiseMethod>{{{DenoiseMethod::kBm3d, "bm3d"},
                                                         {DenoiseMethod::kNlm, "nlm"},
                                                         {DenoiseMethod::kNone, "none"}}},
                               [](C& c) -> DenoiseMethod& { return c.denoise.method; }));
    e.push_back(enumeration_at("denoise.color_mode",
                               EnumNames<DenoiseColorMode>{{{DenoiseColorMode::kPerChannel, "per_channel"},
                                                            {DenoiseColorMode::kLumaChroma, "luma_chroma"}}},
                               [](C& c) -> DenoiseColorMode& { return c.denoise.color_mode; }));
    e.push_back(real_at("denoise.threshold_low", [](C& c) -> double& { return c.noise.threshold_low; }));
    e.push_back(real_at("denoise.threshold_high", [](C& c) -> double& { return c.noise.threshold_high; }));
    e.push_back(real_at("denoise.sigma_low", [](C& c) -> double& { return c.noise.sigma[0]; }));
    e.push_back(real_at("denoise.sigma_mid", [](C& c) -> double& { return c.noise.sigma[1]; }));
    e.push_back(real_at("denoise.sigma_high", [](C& c) -> double& { return c.noise.sigma[2]; }));
    e.push_back(integer_at("bm3d.block_size", [](C& c) -> int& { return c.denoise.bm3d.block_size; }));
    e.push_back(integer_at("bm3d.search_window", [](C& c) -> int& { return c.denoise.bm3d.search_window; }));
    e.push_back(integer_at("bm3d.max_matched", [](C& c) -> int& { return c.denoise.bm3d.max_matched; }));
    e.push_back(integer_at("bm3d.step", [](C& c) -> int& { return c.denoise.bm3d.step; }));
    e.push_back(real_at("bm3d.lambda_hard", [](C& c) -> double& { return c.denoise.bm3d.lambda_hard; }));
    e.push_back(real_at("bm3d.kaiser_beta", [](C& c) -> double& { return c.denoise.bm3d.kaiser_beta; }));
    e.push_back(integer_at("nlm.patch", [](C& c) -> int& { return c.denoise.nlm.patch; }));
    e.push_back(integer_at("nlm.search", [](C& c) -> int& { return c.denoise.nlm.search; }));
    e.push_back(real_at("nlm.h_factor", [](C& c) -> double& { return c.denoise.nlm.h_factor; }));

    e.push_back(real_at("blend.u", [](C& c) -> double& { return c.blend.u; }));
    e.push_back(real_at("blend.mask_sigma", [](C& c) -> double& { return c.blend.mask_sigma; }));

    e.push_back(real_at("gi.blur_sigma", [](C& c) -> double& { return c.grayness.blur_sigma; }));
    e.push_back(real_at("gi.top_fraction", [](C& c) -> double& { return c.grayness.top_fraction; }));
    e.push_back(real_at("gi.dark_floor", [](C& c) -> double& { return c.grayness.dark_floor; }));
    e.push_back(real_at("gi.saturation", [](C& c) -> double& { return c.grayness.saturation; }));
    e.push_back(real_at("gi.contrast_floor", [](C& c) -> double& { return c.grayness.contrast_floor; }));

    e.push_back(boolean_at("stages.local_contrast", [](C& c) -> bool& { return c.stages.local_contrast; }));
    e.push_back(boolean_at("stages.contrast_stretch", [](C& c) -> bool& { return c.stages.contrast_stretch; }));
    e.push_back(boolean_at("stages.saturation", [](C& c) -> bool& { return c.stages.saturation; }));
    e.push_back(boolean_at("stages.black_point", [](C& c) -> bool& { return c.stages.black_point; }));
    e.push_back(boolean_at("stages.gamma", [](C& c) -> bool& { return c.stages.gamma; }));
    e.push_back(boolean_at("stages.sharpen", [](C& c) -> bool& { return c.stages.sharpen; }));
    e.push_back(boolean_at("stages.quantize", [](C& c) -> bool& { return c.stages.quantize; }));
    e.push_back(boolean_at("stages.resize", [](C& c) -> bool& { return c.stages.resize; }));
    e.push_back(boolean_at("stages.denoise", [](C& c) -> bool& { return c.stages.denoise; }));
    e.push_back(boolean_at("stages.blend", [](C& c) -> bool& { return c.stages.blend; }));
    e.push_back(boolean_at("stages.grayness_index", [](C& c) -> bool& { return c.stages.grayness_index; }));
    e.push_back(boolean_at("stages.orientation", [](C& c) -> bool& { return c.stages.orientation; }));
    e.push_back(boolean_at("diagnostics.histograms", [](C& c) -> bool& { return c.capture_histograms; }));
    return e;
  }();
  return table;
}

}  // namespace config_detail

/// Sets one `key = value` pair; unknown keys are an InvalidConfig error.
inline void set_config_value(PipelineConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& e : config_detail::entries()) {
    if (e.key == key) {
      e.set(cfg, config_detail::trim(value));
      return;
    }
  }
  fail(Errc::kInvalidConfig, "unknown key '" + key + "'");
}

inline std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& e : config_detail::entries()) keys.push_back(e.key);
  return keys;
}

inline std::string get_config_value(const PipelineConfig& cfg, const std::string& key) {
  for (const auto& e : config_detail::entries())
    if (e.key == key) return e.get(cfg);
  fail(Errc::kInvalidConfig, "unknown key '" + key + "'");
}

// Flat text: one `key = value` per line, '#' starts a comment. Keys not
// present keep the values already in `base`.
inline PipelineConfig parse_config(const std::string& text, PipelineConfig base = {}) {
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = config_detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(Errc::kInvalidConfig, "line " + std::to_string(number) + ": expected 'key = value'");
    set_config_value(base, config_detail::trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  base.validate();
  return base;
}

inline PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {}) {
  std::ifstream in(path);
  if (!in) fail(Errc::kFileNotFound, "config " + path.string());
  std::stringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), std::move(base));
}

inline std::string format_config(const PipelineConfig& cfg) {
  std::ostringstream out;
  out << "# nightforge pipeline configuration\n";
  std::string section;
  for (const auto& e : config_detail::entries()) {
    const std::string prefix = e.key.substr(0, e.key.find('.'));
    if (prefix != section) {
      out << '\n';
      section = prefix;
    }
    out << e.key << " = " << e.get(cfg) << '\n';
  }
  return out.str();
}

}  // namespace nightforge
