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

#include <cstdio>
#include <stdexcept>

#include "evptrack/tracker.hpp"
#include "evptrack/train.hpp"
#include "json.hpp"

namespace evp {

EvalReport evaluate_model(const ModelParams<float>& params, const TrackerConfig& tracker,
                          std::span<const VideoSequence> suite) {
  if (suite.empty()) throw std::invalid_argument("evaluate_model: empty suite");
  std::vector<VideoMetrics> per_video;
  for (const auto& video : suite) {
    if (video.frames.size() < 2) throw std::invalid_argument("evaluate_model: " + video.name + " has fewer than 2 frames");
    const auto boxes = track_video<float>(params, tracker, video.frames, video.boxes.front());
    const std::vector<BBox> pred(boxes.begin() + 1, boxes.end());
    const std::vector<BBox> gt(video.boxes.begin() + 1, video.boxes.end());
    per_video.push_back(evaluate_video(video.name, pred, gt));
  }
  return make_report(std::move(per_video));
}

DataConfig drift_suite_config(const RunConfig& cfg) {
  DataConfig suite = cfg.data;
  suite.num_videos = cfg.ablation.suite_videos;
  suite.frames = cfg.ablation.suite_frames;
  suite.drift_rate = cfg.ablation.suite_drift;
  suite.seed = cfg.ablation.suite_seed;
  return suite;
}

namespace {

void finish_arm(ArmResult& arm) {
  const double n = static_cast<double>(arm.seeds.size());
  arm.mean_iou = 0.0;
  arm.auc = 0.0;
  for (std::size_t k = 0; k < arm.seeds.size(); ++k) {
    arm.mean_iou += arm.seed_mean_iou[k] / n;
    arm.auc += arm.seed_auc[k] / n;
  }
}

nlohmann::json arm_json(const ArmResult& a) {
  return {{"label", a.label},           {"prompts", std::string(to_string(a.prompts))},
          {"seeds", a.seeds},           {"seed_mean_iou", a.seed_mean_iou},
          {"seed_auc", a.seed_auc},     {"mean_iou", a.mean_iou},
          {"auc", a.auc}};
}

}  // namespace

AblationReport compare_arms(const std::vector<ModelParams<float>>& baseline,
                            const std::vector<ModelParams<float>>& prompted, const std::vector<std::uint64_t>& seeds,
                            const TrackerConfig& tracker, std::span<const VideoSequence> suite) {
  if (baseline.size() != seeds.size() || prompted.size() != seeds.size() || seeds.empty()) {
    throw std::invalid_argument("compare_arms: need one model per seed in each arm");
  }
  AblationReport r;
  r.suite_videos = suite.size();
  r.baseline.label = "baseline";
  r.prompted.label = "prompts";
  r.baseline.prompts = baseline.front().config.prompts;
  r.prompted.prompts = prompted.front().config.prompts;
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    for (auto [arm, model] : {std::pair{&r.baseline, &baseline[k]}, std::pair{&r.prompted, &prompted[k]}}) {
      const EvalReport e = evaluate_model(*model, tracker, suite);
      arm->seeds.push_back(seeds[k]);
      arm->seed_mean_iou.push_back(e.aggregate.mean_iou);
      arm->seed_auc.push_back(e.aggregate.auc);
    }
  }
  finish_arm(r.baseline);
  finish_arm(r.prompted);
  r.delta_mean_iou = r.prompted.mean_iou - r.baseline.mean_iou;
  r.delta_auc = r.prompted.auc - r.baseline.auc;
  return r;
}

AblationReport run_ablation(const RunConfig& cfg, const AblationLog& log) {
  if (cfg.ablation.seeds.empty()) throw std::invalid_argument("run_ablation: no seeds");
  const auto train_set = synth_dataset(cfg.data);
  const auto suite = synth_dataset(drift_suite_config(cfg));
  std::vector<ModelParams<float>> baseline, prompted;
  for (const std::uint64_t seed : cfg.ablation.seeds) {
    for (const PromptMode mode : {PromptMode::kNone, PromptMode::kBoth}) {
      RunConfig arm = cfg;
      arm.model.prompts = mode;
      arm.train.seed = seed;
      TrainResult tr = train_loop(arm, train_set);
      if (log) {
        char line[160];
        std::snprintf(line, sizeof line, "seed %llu prompts=%s: loss %.4f -> %.4f",
                      static_cast<unsigned long long>(seed), std::string(to_string(mode)).c_str(),
                      tr.loss_trace.front(), tr.loss_trace.back());
        log(line);
      }
      (mode == PromptMode::kNone ? baseline : prompted).push_back(std::move(tr.params));
    }
  }
  AblationReport r = compare_arms(baseline, prompted, cfg.ablation.seeds, cfg.tracker, suite);
  r.suite_drift = cfg.ablation.suite_drift;
  return r;
}

std::string AblationReport::to_json() const {
  nlohmann::json j;
  j["baseline"] = arm_json(baseline);
  j["prompts"] = arm_json(prompted);
  j["delta_mean_iou"] = delta_mean_iou;
  j["delta_auc"] = delta_auc;
  j["suite_videos"] = suite_videos;
  j["suite_drift"] = suite_drift;
  return j.dump(2) + "\n";
}

std::string AblationReport::to_text() const {
  std::string out;
  char line[200];
  std::snprintf(line, sizeof line, "%-10s %-8s %9s %9s\n", "arm", "prompts", "mean IoU", "AUC");
  out += line;
  for (const ArmResult* a : {&baseline, &prompted}) {
    std::snprintf(line, sizeof line, "%-10s %-8s %9.4f %9.4f\n", a->label.c_str(),
                  std::string(to_string(a->prompts)).c_str(), a->mean_iou, a->auc);
    out += line;
  }
  std::snprintf(line, sizeof line, "delta (prompts - baseline): mean IoU %+.4f, AUC %+.4f over %zu seeds, %zu videos\n",
                delta_mean_iou, delta_auc, baseline.seeds.size(), suite_videos);
  out += line;
  return out;
}

}  // namespace evp
