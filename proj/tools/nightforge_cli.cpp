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

// nightforge command line: render, batch, bench, inspect, synth, defaults.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nightforge/config.hpp"
#include "nightforge/frame_io.hpp"
#include "nightforge/parallel.hpp"
#include "nightforge/pipeline.hpp"
#include "nightforge/report.hpp"
#include "nightforge/synthetic.hpp"

namespace fs = std::filesystem;
namespace nf = nightforge;

namespace {

constexpr int kExitProcessing = 1;
constexpr int kExitUsage = 2;

struct ConfigArgs {
  std::string file;
  std::vector<std::string> overrides;
};

void add_config_options(CLI::App* cmd, ConfigArgs& args) {
  cmd->add_option("-c,--config", args.file, "key = value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--set", args.overrides, "override one key, e.g. --set denoise.method=nlm");
}

nf::PipelineConfig build_config(const ConfigArgs& args) {
  nf::PipelineConfig cfg = args.file.empty() ? nf::PipelineConfig{} : nf::load_config(args.file);
  for (const std::string& kv : args.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) nf::fail(nf::Errc::kInvalidConfig, "--set expects key=value, got '" + kv + "'");
    nf::set_config_value(cfg, nf::config_detail::trim(kv.substr(0, eq)), kv.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

fs::path sidecar_for(const fs::path& png, const std::string& json) {
  if (!json.empty()) return json;
  fs::path p = png;
  return p.replace_extension(".json");
}

nf::RawFrame load_frame(const fs::path& png, const fs::path& json) {
  try {
    return nf::load_raw(png, json);
  } catch (const nf::Error& e) {
    throw nf::StageError("frame_io", e);
  }
}

// "ROWSxCOLS" -> synthetic frame; used by bench and inspect when no file is given.
nf::RawFrame synthetic_frame(const std::string& dims) {
  const auto x = dims.find('x');
  nf::NightSceneParams p;
  try {
    if (x == std::string::npos) throw std::invalid_argument(dims);
    p.rows = std::stoi(dims.substr(0, x));
    p.cols = std::stoi(dims.substr(x + 1));
  } catch (const std::exception&) {
    nf::fail(nf::Errc::kInvalidArgument, "--synthetic expects ROWSxCOLS, got '" + dims + "'");
  }
  return nf::make_night_scene(p).raw;
}

int cmd_render(const std::string& png, const std::string& json, const std::string& out, const ConfigArgs& ca) {
  const nf::PipelineConfig cfg = build_config(ca);
  const auto res = nf::render_file(png, sidecar_for(png, json), out, cfg);
  std::cout << out << ": " << res.image.cols() << "x" << res.image.rows() << ", noise class "
            << nf::to_string(res.noise.level) << "\n";
  return 0;
}

int cmd_batch(const std::string& dir, const std::string& out_dir, const ConfigArgs& ca) {
  const nf::PipelineConfig cfg = build_config(ca);
  if (!fs::is_directory(dir)) nf::fail(nf::Errc::kFileNotFound, "input directory " + dir);
  std::vector<fs::path> frames;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".png") frames.push_back(entry.path());
  std::ranges::sort(frames);
  fs::create_directories(out_dir);

  std::mutex io;
  std::atomic<int> failures{0};
  // One frame per task; stages inside a task run on that worker alone.
  nf::parallel_for(0, frames.size(), [&](std::size_t i) {
    const fs::path& png = frames[i];
    const fs::path jpeg = fs::path(out_dir) / png.stem().concat(".jpg");
    try {
      nf::render_file(png, sidecar_for(png, ""), jpeg, cfg);
      std::lock_guard lock(io);
      std::cout << png.filename().string() << " -> " << jpeg.string() << "\n";
    } catch (const nf::Error& e) {
      ++failures;
      std::lock_guard lock(io);
      std::cerr << png.filename().string() << ": " << e.what() << "\n";
    }
  });
  std::cout << frames.size() - failures << "/" << frames.size() << " frames rendered\n";
  return failures ? kExitProcessing : 0;
}

int cmd_bench(const std::string& png, const std::string& json, const std::string& synth, int runs, bool csv,
              const ConfigArgs& ca) {
  const nf::PipelineConfig cfg = build_config(ca);
  if (runs < 1) nf::fail(nf::Errc::kInvalidArgument, "--runs must be >= 1");
  const nf::RawFrame frame = synth.empty() ? load_frame(png, sidecar_for(png, json)) : synthetic_frame(synth);
  std::vector<std::vector<nf::StageReport>> all;
  for (int i = 0; i < runs; ++i) {
    all.push_back(nf::run_pipeline(frame, cfg).reports);
    std::cerr << "run " << i + 1 << "/" << runs << "\n";
  }
  const nf::TimingTable table = nf::emit_timing_table(all);
  std::cout << (csv ? nf::format_timing_csv(table) : nf::format_timing_text(table));
  return 0;
}

int cmd_inspect(const std::string& png, const std::string& json, const std::string& synth, const std::string& out,
                bool images, const ConfigArgs& ca) {
  nf::PipelineConfig cfg = build_config(ca);
  cfg.capture_histograms = true;
  const nf::RawFrame frame = synth.empty() ? load_frame(png, sidecar_for(png, json)) : synthetic_frame(synth);
  fs::create_directories(out);
  int index = 0;
  nf::StageObserver dump;
  if (images) {
    dump = [&](const nf::StageReport& r, const nf::ImagePlanar& img) {
      char name[64];
      std::snprintf(name, sizeof name, "%02d_%s.jpg", index++, r.name.c_str());
      if (img.channels() == 1 || img.channels() == 3) {
        try {
          nf::save_jpeg(img, fs::path(out) / name, 95);
        } catch (const nf::Error& e) {
          throw nf::StageError("frame_io", e);
        }
      }
    };
  }
  const nf::PipelineResult res = nf::run_pipeline(frame, cfg, dump);
  const auto files = nf::emit_stage_histograms(res.reports, out);
  std::ofstream(fs::path(out) / "timing.txt") << nf::format_timing_text(nf::emit_timing_table({res.reports}));
  std::cout << "wrote " << files.size() << " files to " << out << "\n";
  return 0;
}

int cmd_synth(const std::string& stem, nf::NightSceneParams p, int orientation) {
  p.orientation = nf::orientation_from_degrees(orientation);
  const nf::SyntheticFrame s = nf::make_night_scene(p);
  const fs::path base(stem);
  if (base.has_parent_path()) fs::create_directories(base.parent_path());
  try {
    nf::save_raw(s.raw, fs::path(stem).concat(".png"), fs::path(stem).concat(".json"));
  } catch (const nf::Error& e) {
    throw nf::StageError("frame_io", e);
  }
  std::cout << stem << ".png, " << stem << ".json\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nightforge: RAW to JPEG rendering for night photographs"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("-j,--threads", threads, "worker threads (default: NIGHTFORGE_THREADS or all cores)");

  std::string png, json, out, synth;
  int runs = 10;
  bool csv = false, images = false;
  ConfigArgs ca;

  auto* render = app.add_subcommand("render", "render one frame to JPEG");
  render->add_option("png", png, "16-bit mosaic PNG")->required();
  render->add_option("json", json, "metadata sidecar (default: PNG path with .json)");
  render->add_option("-o,--output", out, "output JPEG")->required();
  add_config_options(render, ca);

  auto* batch = app.add_subcommand("batch", "render every PNG/JSON pair in a directory");
  batch->add_option("dir", png, "input directory")->required();
  batch->add_option("-o,--output", out, "output directory")->required();
  add_config_options(batch, ca);

  auto* bench = app.add_subcommand("bench", "per-stage timing table averaged over several runs");
  bench->add_option("png", png, "16-bit mosaic PNG");
  bench->add_option("json", json, "metadata sidecar");
  bench->add_option("--synthetic", synth, "use a generated ROWSxCOLS night scene instead of a file");
  bench->add_option("-n,--runs", runs, "number of runs")->capture_default_str();
  bench->add_flag("--csv", csv, "CSV instead of a text table");
  add_config_options(bench, ca);

  auto* inspect = app.add_subcommand("inspect", "dump per-stage histograms and a summary page");
  inspect->add_option("png", png, "16-bit mosaic PNG");
  inspect->add_option("json", json, "metadata sidecar");
  inspect->add_option("--synthetic", synth, "use a generated ROWSxCOLS night scene instead of a file");
  inspect->add_option("-o,--output", out, "output directory")->required();
  inspect->add_flag("--images", images, "also write every intermediate image");
  add_config_options(inspect, ca);

  nf::NightSceneParams sp;
  int orientation = 0;
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic night frame (PNG + JSON)");
  synth_cmd->add_option("-o,--output", out, "output path without extension")->required();
  synth_cmd->add_option("--rows", sp.rows)->capture_default_str();
  synth_cmd->add_option("--cols", sp.cols)->capture_default_str();
  synth_cmd->add_option("--seed", sp.seed)->capture_default_str();
  synth_cmd->add_option("--orientation", orientation, "0, 90, -90 or 180")->capture_default_str();

  auto* defaults = app.add_subcommand("defaults", "print the default configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  for (auto* cmd : {bench, inspect})
    if (cmd->parsed() && png.empty() == synth.empty()) {
      std::cerr << "nightforge " << cmd->get_name() << ": give either an input PNG or --synthetic\n";
      return kExitUsage;
    }
  nf::set_thread_count(threads);

  try {
    if (render->parsed()) return cmd_render(png, json, out, ca);
    if (batch->parsed()) return cmd_batch(png, out, ca);
    if (bench->parsed()) return cmd_bench(png, json, synth, runs, csv, ca);
    if (inspect->parsed()) return cmd_inspect(png, json, synth, out, images, ca);
    if (synth_cmd->parsed()) return cmd_synth(out, sp, orientation);
    if (defaults->parsed()) {
      std::cout << nf::format_config(nf::PipelineConfig{});
      return 0;
    }
  } catch (const nf::StageError& e) {
    std::cerr << "nightforge: " << e.what() << "\n";
    return kExitProcessing;
  } catch (const nf::Error& e) {
    std::cerr << "nightforge: " << e.what() << "\n";
    return e.code() == nf::Errc::kInvalidConfig || e.code() == nf::Errc::kInvalidArgument ? kExitUsage
                                                                                         : kExitProcessing;
  } catch (const std::exception& e) {
    std::cerr << "nightforge: " << e.what() << "\n";
    return kExitProcessing;
  }
  return kExitUsage;
}
