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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "nightforge/frame_io.hpp"
#include "support.hpp"

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

// Runs the CLI with `args`, capturing both streams.
Run cli(const nftest::TempDir& dir, const std::string& args) {
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  const std::string cmd = std::string(NIGHTFORGE_CLI) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  };
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

// Small output and the cheaper denoiser keep each invocation fast.
const std::string kFast = " --set output.landscape_width=96 --set output.landscape_height=64"
                          " --set output.portrait_width=64 --set output.portrait_height=96 --set denoise.method=nlm";

}  // namespace

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto r = cli(dir_, "synth -o " + (dir_ / "frame").string() + " --rows 48 --cols 64");
    ASSERT_EQ(r.code, 0) << r.err;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  nftest::TempDir dir_;
};

TEST_F(Cli, RenderWritesJpeg) {
  const auto r = cli(dir_, "render " + path("frame.png") + " -o " + path("out.jpg") + kFast);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto img = nightforge::load_jpeg(path("out.jpg"));
  EXPECT_EQ(img.cols(), 96);
  EXPECT_EQ(img.rows(), 64);
}

TEST_F(Cli, RenderWithConfigFile) {
  std::ofstream(path("c.cfg")) << "output.landscape_width = 80\noutput.landscape_height = 40\ndenoise.method = none\n";
  const auto r = cli(dir_, "render " + path("frame.png") + " " + path("frame.json") + " -c " + path("c.cfg") +
                               " -o " + path("out.jpg"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nightforge::load_jpeg(path("out.jpg")).cols(), 80);
}

TEST_F(Cli, MissingMetadataFailsInFrameIo) {
  const auto r = cli(dir_, "render " + path("frame.png") + " " + path("absent.json") + " -o " + path("out.jpg"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("frame_io"), std::string::npos) << r.err;
  EXPECT_FALSE(std::filesystem::exists(path("out.jpg")));
}

TEST_F(Cli, UsageErrorsExitWithTwo) {
  EXPECT_EQ(cli(dir_, "render").code, 2);
  EXPECT_EQ(cli(dir_, "no-such-command").code, 2);
  EXPECT_EQ(cli(dir_, "bench").code, 2);
  EXPECT_EQ(cli(dir_, "render " + path("frame.png") + " -o " + path("o.jpg") + " --set blend.u=7").code, 2);
  EXPECT_EQ(cli(dir_, "render " + path("frame.png") + " -o " + path("o.jpg") + " --set bogus=1").code, 2);
  EXPECT_EQ(cli(dir_, "--help").code, 0);
}

TEST_F(Cli, BenchReportsMeanOverRuns) {
  const auto r = cli(dir_, "bench " + path("frame.png") + " --runs 10" + kFast);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("mean of 10 run(s)"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("Entire pipeline"), std::string::npos);
  EXPECT_NE(r.out.find("denoise"), std::string::npos);

  const auto csv = cli(dir_, "bench --synthetic 32x48 -n 2 --csv" + kFast);
  ASSERT_EQ(csv.code, 0) << csv.err;
  EXPECT_EQ(csv.out.rfind("group,stage,mean_seconds,percent", 0), 0u);
}

TEST_F(Cli, BatchRendersEveryPair) {
  std::filesystem::create_directories(dir_ / "in");
  for (const char* name : {"a", "b"}) {
    std::filesystem::copy_file(dir_ / "frame.png", dir_ / "in" / (std::string(name) + ".png"));
    std::filesystem::copy_file(dir_ / "frame.json", dir_ / "in" / (std::string(name) + ".json"));
  }
  const auto r = cli(dir_, "batch " + path("in") + " -o " + path("out") + kFast);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("2/2 frames rendered"), std::string::npos) << r.out;
  EXPECT_TRUE(std::filesystem::exists(dir_ / "out" / "a.jpg"));
  EXPECT_TRUE(std::filesystem::exists(dir_ / "out" / "b.jpg"));
}

TEST_F(Cli, InspectWritesHistograms) {
  const auto r = cli(dir_, "inspect " + path("frame.png") + " -o " + path("hist") + " --images" + kFast);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(dir_ / "hist" / "summary.html"));
  EXPECT_TRUE(std::filesystem::exists(dir_ / "hist" / "12_denoise.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir_ / "hist" / "timing.txt"));
}

TEST_F(Cli, DefaultsPrintsConfig) {
  const auto r = cli(dir_, "defaults");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("blend.u = 0.6"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("denoise.method = bm3d"), std::string::npos);
}
