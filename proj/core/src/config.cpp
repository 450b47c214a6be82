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

#include "evptrack/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "evptrack/errors.hpp"
#include "json.hpp"

namespace evp {

using nlohmann::json;

namespace {

// Reads the keys of one config section, rejecting anything it does not know.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ConfigError("config section '" + name_ + "' must be an object");
  }

  template <typename V>
  void get(const char* key, V& out) {
    known_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<V>();
    } catch (const json::exception& e) {
      throw ConfigError("config key '" + name_ + "." + key + "': " + e.what());
    }
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!known_.count(item.key())) throw ConfigError("unknown config key '" + name_ + "." + item.key() + "'");
    }
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> known_;
};

void read_model(const json& j, ModelConfig& m) {
  Section s(j, "model");
  s.get("dim", m.dim);
  s.get("heads", m.heads);
  s.get("depth", m.depth);
  s.get("st_depth", m.st_depth);
  s.get("mlp_ratio", m.mlp_ratio);
  s.get("template_size", m.template_size);
  s.get("search_size", m.search_size);
  s.get("prompt_scales", m.prompt_scales);
  s.get("learnable_tokens", m.learnable_tokens);
  std::string prompts(to_string(m.prompts));
  s.get("prompts", prompts);
  m.prompts = parse_prompt_mode(prompts);
  std::string state_input(to_string(m.state_input));
  s.get("state_input", state_input);
  m.state_input = parse_state_input(state_input);
  s.get("ln_eps", m.ln_eps);
  s.get("init_std", m.init_std);
  s.get("pixel_mean", m.pixel_mean);
  s.get("pixel_std", m.pixel_std);
  s.finish();
}

json write_model(const ModelConfig& m) {
  return json{{"dim", m.dim},
              {"heads", m.heads},
              {"depth", m.depth},
              {"st_depth", m.st_depth},
              {"mlp_ratio", m.mlp_ratio},
              {"template_size", m.template_size},
              {"search_size", m.search_size},
              {"prompt_scales", m.prompt_scales},
              {"learnable_tokens", m.learnable_tokens},
              {"prompts", std::string(to_string(m.prompts))},
              {"state_input", std::string(to_string(m.state_input))},
              {"ln_eps", m.ln_eps},
              {"init_std", m.init_std},
              {"pixel_mean", m.pixel_mean},
              {"pixel_std", m.pixel_std}};
}

void read_loss(const json& j, LossConfig& l) {
  Section s(j, "loss");
  s.get("lambda_l1", l.lambda_l1);
  s.get("lambda_giou", l.lambda_giou);
  s.get("focal_alpha", l.focal_alpha);
  s.get("focal_beta", l.focal_beta);
  s.get("clamp_eps", l.clamp_eps);
  s.finish();
}

void read_tracker(const json& j, TrackerConfig& t) {
  Section s(j, "tracker");
  s.get("search_factor", t.search_factor);
  s.get("template_factor", t.template_factor);
  s.get("hann_weight", t.hann_weight);
  s.finish();
}

void read_data(const json& j, DataConfig& d) {
  Section s(j, "data");
  s.get("num_videos", d.num_videos);
  s.get("frames", d.frames);
  s.get("frame_size", d.frame_size);
  s.get("min_target", d.min_target);
  s.get("max_target", d.max_target);
  s.get("speed", d.speed);
  s.get("scale_amplitude", d.scale_amplitude);
  s.get("drift_rate", d.drift_rate);
  s.get("seed", d.seed);
  s.finish();
}

void read_train(const json& j, TrainConfig& t) {
  Section s(j, "train");
  s.get("videos_per_batch", t.videos_per_batch);
  s.get("frames_per_video", t.frames_per_video);
  s.get("steps", t.steps);
  s.get("lr", t.lr);
  s.get("backbone_lr", t.backbone_lr);
  s.get("weight_decay", t.weight_decay);
  s.get("beta1", t.beta1);
  s.get("beta2", t.beta2);
  s.get("adam_eps", t.adam_eps);
  s.get("decay_fraction", t.decay_fraction);
  s.get("decay_factor", t.decay_factor);
  s.get("grad_clip", t.grad_clip);
  s.get("detach_state", t.detach_state);
  s.get("flip_prob", t.flip_prob);
  s.get("brightness_jitter", t.brightness_jitter);
  s.get("center_jitter", t.center_jitter);
  s.get("scale_jitter", t.scale_jitter);
  s.get("checkpoint_every", t.checkpoint_every);
  s.get("seed", t.seed);
  s.finish();
}

void read_ablation(const json& j, AblationConfig& a) {
  Section s(j, "ablation");
  s.get("seeds", a.seeds);
  s.get("suite_videos", a.suite_videos);
  s.get("suite_frames", a.suite_frames);
  s.get("suite_drift", a.suite_drift);
  s.get("suite_seed", a.suite_seed);
  s.finish();
}

void validate_run(const RunConfig& c) {
  c.model.validate();
  if (c.train.videos_per_batch == 0 || c.train.frames_per_video == 0) {
    throw ConfigError("train.videos_per_batch and train.frames_per_video must be positive");
  }
  if (c.data.frames < 2) throw ConfigError("data.frames must be at least 2");
  if (c.tracker.hann_weight < 0.0 || c.tracker.hann_weight > 1.0) {
    throw ConfigError("tracker.hann_weight must lie in [0, 1]");
  }
  if (!(c.tracker.search_factor > 0.0) || !(c.tracker.template_factor > 0.0)) {
    throw ConfigError("tracker crop factors must be positive");
  }
  if (!(c.loss.clamp_eps > 0.0) || c.loss.clamp_eps >= 0.5) throw ConfigError("loss.clamp_eps out of range");
  if (c.train.decay_fraction < 0.0 || c.train.decay_fraction > 1.0) {
    throw ConfigError("train.decay_fraction must lie in [0, 1]");
  }
}

}  // namespace

std::string_view to_string(PromptMode mode) {
  switch (mode) {
    case PromptMode::kNone: return "none";
    case PromptMode::kMultiScale: return "ms";
    case PromptMode::kSpatioTemporal: return "st";
    case PromptMode::kBoth: return "both";
    case PromptMode::kLearnable: return "learnable";
  }
  return "both";
}

PromptMode parse_prompt_mode(std::string_view text) {
  if (text == "none") return PromptMode::kNone;
  if (text == "ms") return PromptMode::kMultiScale;
  if (text == "st") return PromptMode::kSpatioTemporal;
  if (text == "both") return PromptMode::kBoth;
  if (text == "learnable") return PromptMode::kLearnable;
  throw ConfigError("unknown prompt mode '" + std::string(text) + "' (expected none|ms|st|both|learnable)");
}

std::string_view to_string(StateInput input) { return input == StateInput::kFused ? "fused" : "raw"; }

StateInput parse_state_input(std::string_view text) {
  if (text == "fused") return StateInput::kFused;
  if (text == "raw") return StateInput::kRaw;
  throw ConfigError("unknown state input '" + std::string(text) + "' (expected fused|raw)");
}

std::size_t ModelConfig::num_prompts() const {
  switch (prompts) {
    case PromptMode::kNone: return 0;
    case PromptMode::kMultiScale: return 3;
    case PromptMode::kSpatioTemporal: return 1;
    case PromptMode::kBoth: return 4;
    case PromptMode::kLearnable: return learnable_tokens;
  }
  return 0;
}

void ModelConfig::validate() const {
  if (dim == 0 || heads == 0 || dim % heads != 0) {
    throw ConfigError("model.dim must be a positive multiple of model.heads");
  }
  if (mlp_ratio == 0) throw ConfigError("model.mlp_ratio must be positive");
  if (template_size == 0 || template_size % kPatchStride != 0) {
    throw ConfigError("model.template_size must be a positive multiple of 16");
  }
  if (search_size == 0 || search_size % kPatchStride != 0) {
    throw ConfigError("model.search_size must be a positive multiple of 16");
  }
  for (std::size_t p : prompt_scales) {
    if (p == 0) throw ConfigError("model.prompt_scales entries must be positive");
  }
  if (prompts == PromptMode::kLearnable && learnable_tokens == 0) {
    throw ConfigError("model.learnable_tokens must be positive in learnable mode");
  }
  if (!(ln_eps > 0.0)) throw ConfigError("model.ln_eps must be positive");
  for (float s : pixel_std) {
    if (!(s > 0.0f)) throw ConfigError("model.pixel_std entries must be positive");
  }
}

ModelConfig ModelConfig::large_scale() {
  ModelConfig c;
  c.dim = 512;
  c.heads = 8;
  c.depth = 12;
  c.template_size = 112;
  c.search_size = 224;
  return c;
}

RunConfig parse_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be an object");
  RunConfig c;
  for (const auto& item : j.items()) {
    const std::string& key = item.key();
    if (key == "model") read_model(item.value(), c.model);
    else if (key == "loss") read_loss(item.value(), c.loss);
    else if (key == "tracker") read_tracker(item.value(), c.tracker);
    else if (key == "data") read_data(item.value(), c.data);
    else if (key == "train") read_train(item.value(), c.train);
    else if (key == "ablation") read_ablation(item.value(), c.ablation);
    else throw ConfigError("unknown config section '" + key + "'");
  }
  validate_run(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string to_json(const RunConfig& c) {
  json j;
  j["model"] = write_model(c.model);
  j["loss"] = {{"lambda_l1", c.loss.lambda_l1},
               {"lambda_giou", c.loss.lambda_giou},
               {"focal_alpha", c.loss.focal_alpha},
               {"focal_beta", c.loss.focal_beta},
               {"clamp_eps", c.loss.clamp_eps}};
  j["tracker"] = {{"search_factor", c.tracker.search_factor},
                  {"template_factor", c.tracker.template_factor},
                  {"hann_weight", c.tracker.hann_weight}};
  j["data"] = {{"num_videos", c.data.num_videos},
               {"frames", c.data.frames},
               {"frame_size", c.data.frame_size},
               {"min_target", c.data.min_target},
               {"max_target", c.data.max_target},
               {"speed", c.data.speed},
               {"scale_amplitude", c.data.scale_amplitude},
               {"drift_rate", c.data.drift_rate},
               {"seed", c.data.seed}};
  j["train"] = {{"videos_per_batch", c.train.videos_per_batch},
                {"frames_per_video", c.train.frames_per_video},
                {"steps", c.train.steps},
                {"lr", c.train.lr},
                {"backbone_lr", c.train.backbone_lr},
                {"weight_decay", c.train.weight_decay},
                {"beta1", c.train.beta1},
                {"beta2", c.train.beta2},
                {"adam_eps", c.train.adam_eps},
                {"decay_fraction", c.train.decay_fraction},
                {"decay_factor", c.train.decay_factor},
                {"grad_clip", c.train.grad_clip},
                {"detach_state", c.train.detach_state},
                {"flip_prob", c.train.flip_prob},
                {"brightness_jitter", c.train.brightness_jitter},
                {"center_jitter", c.train.center_jitter},
                {"scale_jitter", c.train.scale_jitter},
                {"checkpoint_every", c.train.checkpoint_every},
                {"seed", c.train.seed}};
  j["ablation"] = {{"seeds", c.ablation.seeds},
                   {"suite_videos", c.ablation.suite_videos},
                   {"suite_frames", c.ablation.suite_frames},
                   {"suite_drift", c.ablation.suite_drift},
                   {"suite_seed", c.ablation.suite_seed}};
  return j.dump(2);
}

std::string model_config_to_json(const ModelConfig& config) { return write_model(config).dump(); }

ModelConfig model_config_from_json(std::string_view json_text) {
  ModelConfig m;
  try {
    read_model(json::parse(json_text), m);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("model metadata is not valid JSON: ") + e.what());
  }
  m.validate();
  return m;
}

}  // namespace evp
