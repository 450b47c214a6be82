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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace evp {

/// Which explicit prompts are prepended to the fusion encoder input.
enum class PromptMode {
  kNone,            // template + search only
  kMultiScale,      // three multi-scale tokens
  kSpatioTemporal,  // one token pooled from the propagated state
  kBoth,            // 3 + 1
  kLearnable,       // free parameter tokens, no generators
};

/// Source of the template/search tokens fed to the temporal encoder.
enum class StateInput { kFused, kRaw };

std::string_view to_string(PromptMode mode);
PromptMode parse_prompt_mode(std::string_view text);
std::string_view to_string(StateInput input);
StateInput parse_state_input(std::string_view text);

inline constexpr std::size_t kPatchStride = 16;

struct ModelConfig {
  std::size_t dim = 64;
  std::size_t heads = 4;
  std::size_t depth = 4;
  std::size_t st_depth = 1;
  std::size_t mlp_ratio = 4;
  std::size_t template_size = 48;
  std::size_t search_size = 96;
  std::array<std::size_t, 3> prompt_scales{14, 16, 18};
  std::size_t learnable_tokens = 4;
  PromptMode prompts = PromptMode::kBoth;
  StateInput state_input = StateInput::kFused;
  double ln_eps = 1e-5;
  double init_std = 0.02;
  std::array<float, 3> pixel_mean{0.485f, 0.456f, 0.406f};
  std::array<float, 3> pixel_std{0.229f, 0.224f, 0.225f};

  std::size_t template_grid() const { return template_size / kPatchStride; }
  std::size_t search_grid() const { return search_size / kPatchStride; }
  std::size_t template_tokens() const { return template_grid() * template_grid(); }
  std::size_t search_tokens() const { return search_grid() * search_grid(); }
  std::size_t num_prompts() const;
  bool uses_multiscale() const { return prompts == PromptMode::kMultiScale || prompts == PromptMode::kBoth; }
  bool uses_spatiotemporal() const {
    return prompts == PromptMode::kSpatioTemporal || prompts == PromptMode::kBoth;
  }
  /// Throws ConfigError on an inconsistent configuration.
  void validate() const;

  /// 112/224 crops, D = 512, 12 layers, 8 heads.
  static ModelConfig large_scale();
};

struct LossConfig {
  double lambda_l1 = 5.0;
  double lambda_giou = 2.0;
  double focal_alpha = 2.0;
  double focal_beta = 4.0;
  double clamp_eps = 1e-6;
};

struct TrackerConfig {
  double search_factor = 4.0;
  double template_factor = 2.0;
  double hann_weight = 0.49;
};

struct DataConfig {
  std::size_t num_videos = 8;
  std::size_t frames = 32;
  std::size_t frame_size = 128;
  double min_target = 16.0;
  double max_target = 28.0;
  double speed = 1.5;
  double scale_amplitude = 0.1;
  double drift_rate = 0.0;
  std::uint64_t seed = 1;
};

struct TrainConfig {
  std::size_t videos_per_batch = 4;  // M
  std::size_t frames_per_video = 8;  // N
  std::size_t steps = 400;
  double lr = 1e-3;
  double backbone_lr = 1e-3;
  double weight_decay = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double decay_fraction = 0.8;
  double decay_factor = 0.1;
  double grad_clip = 1.0;  // global norm, 0 disables
  bool detach_state = false;
  double flip_prob = 0.5;
  double brightness_jitter = 0.2;
  double center_jitter = 0.8;  // in units of sqrt(w*h)
  double scale_jitter = 0.15;  // log-scale half range
  std::size_t checkpoint_every = 0;
  std::uint64_t seed = 7;
};

struct AblationConfig {
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::size_t suite_videos = 20;
  std::size_t suite_frames = 24;
  double suite_drift = 0.06;
  std::uint64_t suite_seed = 1000;
};

struct RunConfig {
  ModelConfig model;
  LossConfig loss;
  TrackerConfig tracker;
  DataConfig data;
  TrainConfig train;
  AblationConfig ablation;
};

/// Parses the JSON config. Absent keys keep their defaults; unknown keys and
/// invalid values raise ConfigError.
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);
std::string to_json(const RunConfig& config);

std::string model_config_to_json(const ModelConfig& config);
ModelConfig model_config_from_json(std::string_view json_text);

}  // namespace evp
