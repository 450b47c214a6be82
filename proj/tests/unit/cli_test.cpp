// Copyright 2026 The evptrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Drives the evptrack executable end to end through its command line.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"

namespace {

namespace fs = std::filesystem;

struct CliRun {
  int status = -1;
  std::string output;
};

CliRun run(const std::string& args) {
  const std::string cmd = std::string(EVP_CLI_PATH) + " " + args + " 2>&1";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[512];
  while (std::fgets(buf, sizeof buf, pipe)) r.output += buf;
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / ("evp_cli_test_" + std::to_string(getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    std::ofstream(dir_ / "config.json") << R"({
      "model": {"dim": 16, "heads": 2, "depth": 1, "mlp_ratio": 2, "template_size": 32, "search_size": 64},
      "data": {"num_videos": 2, "frames": 6, "frame_size": 64, "min_target": 10, "max_target": 14},
      "train": {"videos_per_batch": 2, "frames_per_video": 2, "steps": 3},
      "ablation": {"seeds": [1], "suite_videos": 2, "suite_frames": 4}
    })";
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }
  static fs::path dir_;
  static std::string path(const std::string& name) { return (dir_ / name).string(); }
};

fs::path CliTest::dir_;

TEST_F(CliTest, SynthTrainTrackEvalPipeline) {
  CliRun r = run("synth --config " + path("config.json") + " --out " + path("data"));
  ASSERT_EQ(r.status, 0) << r.output;
  ASSERT_TRUE(fs::exists(dir_ / "data" / "video_000" / "groundtruth.txt"));
  ASSERT_TRUE(fs::exists(dir_ / "data" / "video_001" / "frame_0005.ppm"));

  r = run("train --config " + path("config.json") + " --data " + path("data") + " --out " + path("model.ckpt"));
  ASSERT_EQ(r.status, 0) << r.output;
  ASSERT_TRUE(fs::exists(dir_ / "model.ckpt"));
  const std::string trace = slurp(dir_ / "model.ckpt.loss.csv");
  // One "step,loss" line per step, no header.
  EXPECT_EQ(trace.rfind("0,", 0), 0u) << trace;
  EXPECT_NE(trace.find("\n2,"), std::string::npos) << trace;
  EXPECT_EQ(std::count(trace.begin(), trace.end(), '\n'), 3) << trace;

  fs::create_directories(dir_ / "results");
  for (const char* v : {"video_000", "video_001"}) {
    r = run("track --ckpt " + path("model.ckpt") + " --video " + path(std::string("data/") + v) + " --out " +
            path(std::string("results/") + v + ".txt"));
    ASSERT_EQ(r.status, 0) << r.output;
  }
  std::istringstream lines(slurp(dir_ / "results" / "video_000.txt"));
  std::string line;
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 3) << line;
    ++n;
  }
  EXPECT_EQ(n, 6u);

  r = run("eval --results " + path("results") + " --gt " + path("data") + " --report " + path("report.json"));
  ASSERT_EQ(r.status, 0) << r.output;
  const auto j = nlohmann::json::parse(slurp(dir_ / "report.json"));
  ASSERT_TRUE(j.contains("aggregate"));
  const double auc = j["aggregate"]["auc"];
  EXPECT_GE(auc, 0.0);
  EXPECT_LE(auc, 1.0);
  EXPECT_EQ(j["videos"].size(), 2u);
}

TEST_F(CliTest, GradcheckPasses) {
  const CliRun r = run("gradcheck");
  EXPECT_EQ(r.status, 0) << r.output;
}

TEST_F(CliTest, AblateWritesReport) {
  const CliRun r = run("ablate --config " + path("config.json") + " --report " + path("ablation.json"));
  ASSERT_EQ(r.status, 0) << r.output;
  const auto j = nlohmann::json::parse(slurp(dir_ / "ablation.json"));
  EXPECT_TRUE(j.contains("delta_mean_iou"));
}

TEST_F(CliTest, FailuresExitNonzeroWithDiagnostic) {
  CliRun r = run("track --ckpt " + path("missing.ckpt") + " --video " + path("data/video_000") + " --out " +
              path("x.txt"));
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.output.find("error"), std::string::npos) << r.output;

  std::ofstream(dir_ / "bad.json") << R"({"model": {"colour": 1}})";
  r = run("synth --config " + path("bad.json") + " --out " + path("unused"));
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.output.find("colour"), std::string::npos) << r.output;

  EXPECT_NE(run("frobnicate").status, 0);
  EXPECT_NE(run("synth").status, 0);
  EXPECT_NE(run("eval --results " + path("nowhere") + " --gt " + path("data") + " --report " + path("r.json")).status,
            0);
}

}  // namespace
