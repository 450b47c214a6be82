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

#include "evptrack/ablation.hpp"

#include <gtest/gtest.h>

#include "json.hpp"

namespace evp {
namespace {

RunConfig tiny_run() {
  RunConfig cfg;
  cfg.model.dim = 16;
  cfg.model.heads = 2;
  cfg.model.depth = 1;
  cfg.model.mlp_ratio = 2;
  cfg.model.template_size = 32;
  cfg.model.search_size = 64;
  cfg.data.num_videos = 3;
  cfg.data.frames = 6;
  cfg.data.frame_size = 64;
  cfg.data.min_target = 10;
  cfg.data.max_target = 14;
  cfg.train.videos_per_batch = 2;
  cfg.train.frames_per_video = 2;
  cfg.train.steps = 2;
  cfg.ablation.seeds = {1, 2};
  cfg.ablation.suite_videos = 3;
  cfg.ablation.suite_frames = 5;
  return cfg;
}

TEST(Ablation, SuiteConfigFollowsAblationSection) {
  const RunConfig cfg = tiny_run();
  const DataConfig d = drift_suite_config(cfg);
  EXPECT_EQ(d.num_videos, 3u);
  EXPECT_EQ(d.frames, 5u);
  EXPECT_DOUBLE_EQ(d.drift_rate, cfg.ablation.suite_drift);
  EXPECT_EQ(d.seed, cfg.ablation.suite_seed);
  EXPECT_EQ(d.frame_size, cfg.data.frame_size);
}

TEST(Ablation, IdenticalArmsHaveZeroDelta) {
  const RunConfig cfg = tiny_run();
  const auto suite = synth_dataset(drift_suite_config(cfg));
  const std::vector<ModelParams<float>> models{ModelParams<float>::init(cfg.model, 1),
                                               ModelParams<float>::init(cfg.model, 2)};
  const AblationReport r = compare_arms(models, models, {1, 2}, cfg.tracker, suite);
  EXPECT_EQ(r.delta_mean_iou, 0.0);
  EXPECT_EQ(r.delta_auc, 0.0);
  EXPECT_EQ(r.baseline.seed_mean_iou.size(), 2u);
  EXPECT_NEAR(r.baseline.mean_iou, 0.5 * (r.baseline.seed_mean_iou[0] + r.baseline.seed_mean_iou[1]), 1e-15);
  EXPECT_THROW(compare_arms(models, {models[0]}, {1, 2}, cfg.tracker, suite), std::invalid_argument);
}

TEST(Ablation, EvaluationSkipsTheInitFrame) {
  const RunConfig cfg = tiny_run();
  const auto suite = synth_dataset(drift_suite_config(cfg));
  const EvalReport e = evaluate_model(ModelParams<float>::init(cfg.model, 3), cfg.tracker, suite);
  ASSERT_EQ(e.videos.size(), 3u);
  for (const auto& v : e.videos) EXPECT_EQ(v.frames, 4u);
}

TEST(Ablation, EndToEndReportCarriesDeltaAndArms) {
  const RunConfig cfg = tiny_run();
  std::vector<std::string> lines;
  const AblationReport r = run_ablation(cfg, [&](const std::string& s) { lines.push_back(s); });
  EXPECT_EQ(lines.size(), 4u);
  EXPECT_EQ(r.baseline.prompts, PromptMode::kNone);
  EXPECT_EQ(r.prompted.prompts, PromptMode::kBoth);
  EXPECT_NEAR(r.delta_mean_iou, r.prompted.mean_iou - r.baseline.mean_iou, 1e-15);
  const auto j = nlohmann::json::parse(r.to_json());
  EXPECT_TRUE(j.contains("delta_mean_iou"));
  EXPECT_NE(r.to_text().find("delta"), std::string::npos);
}

}  // namespace
}  // namespace evp
