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

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "evptrack/config.hpp"
#include "evptrack/metrics.hpp"
#include "evptrack/model.hpp"
#include "evptrack/synth.hpp"

namespace evp {

/// Tracks every suite video and scores frames 1..T-1 (frame 0 is the given
/// initialization and would inflate every metric).
EvalReport evaluate_model(const ModelParams<float>& params, const TrackerConfig& tracker,
                          std::span<const VideoSequence> suite);

struct ArmResult {
  std::string label;
  PromptMode prompts = PromptMode::kNone;
  std::vector<std::uint64_t> seeds;
  std::vector<double> seed_mean_iou;
  std::vector<double> seed_auc;
  double mean_iou = 0.0;
  double auc = 0.0;
};

struct AblationReport {
  ArmResult baseline;
  ArmResult prompted;
  double delta_mean_iou = 0.0;  // prompted - baseline
  double delta_auc = 0.0;
  std::size_t suite_videos = 0;
  double suite_drift = 0.0;

  std::string to_json() const;
  std::string to_text() const;
};

/// The appearance-drift evaluation suite described by `cfg.ablation`.
DataConfig drift_suite_config(const RunConfig& cfg);

/// Scores two already-trained models per seed on the same suite.
AblationReport compare_arms(const std::vector<ModelParams<float>>& baseline,
                            const std::vector<ModelParams<float>>& prompted, const std::vector<std::uint64_t>& seeds,
                            const TrackerConfig& tracker, std::span<const VideoSequence> suite);

using AblationLog = std::function<void(const std::string&)>;

/// Trains prompts=none and prompts=both for every ablation seed on the
/// training set from `cfg.data`, then compares them on the drift suite.
AblationReport run_ablation(const RunConfig& cfg, const AblationLog& log = {});

}  // namespace evp
