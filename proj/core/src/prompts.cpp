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

#include "evptrack/prompts.hpp"

namespace evp {

template <typename T>
PromptParams<T> PromptParams<T>::init(const ModelConfig& cfg, Rng& rng) {
  PromptParams p;
  for (std::size_t s = 0; s < 3; ++s) {
    const std::size_t P = cfg.prompt_scales[s];
    p.scale_proj[s] = init_truncated_normal<T>({Image::kChannels * P * P, cfg.dim}, cfg.init_std, rng);
  }
  p.multiscale_ffn = FeedForward<T>::init(cfg.dim, cfg.mlp_ratio * cfg.dim, cfg.dim, cfg.init_std, rng);
  p.spatiotemporal_ffn = FeedForward<T>::init(cfg.dim, cfg.mlp_ratio * cfg.dim, cfg.dim, cfg.init_std, rng);
  if (cfg.prompts == PromptMode::kLearnable) {
    p.learnable = init_truncated_normal<T>({cfg.learnable_tokens, cfg.dim}, cfg.init_std, rng);
  }
  return p;
}

template <typename T>
void PromptParams<T>::collect(ParameterList<T>& out, const std::string& prefix) const {
  for (std::size_t s = 0; s < 3; ++s)
    out.push_back({prefix + ".scale_proj." + std::to_string(s), scale_proj[s], ParamGroup::kOther});
  multiscale_ffn.collect(out, prefix + ".multiscale_ffn", ParamGroup::kOther);
  spatiotemporal_ffn.collect(out, prefix + ".spatiotemporal_ffn", ParamGroup::kOther);
  if (learnable.defined()) out.push_back({prefix + ".learnable", learnable, ParamGroup::kOther});
}

template <typename T>
Tensor<T> gen_multiscale_prompt(const ImageCrop& tmpl, const PromptParams<T>& params, const ModelConfig& cfg) {
  std::vector<Tensor<T>> pooled;
  for (std::size_t s = 0; s < 3; ++s) {
    pooled.push_back(mean_pool(multiscale_patchify(tmpl, cfg.prompt_scales[s], params.scale_proj[s], cfg)));
  }
  return params.multiscale_ffn(concat_tokens(pooled));
}

template <typename T>
Tensor<T> gen_spatiotemporal_prompt(const Tensor<T>& state, const FeedForward<T>& ffn) {
  if (!state.defined() || state.rank() != 2) throw ShapeError("gen_spatiotemporal_prompt: empty state");
  return ffn(mean_pool(state));
}

template <typename T>
SpatioTemporalState<T> init_state(const Tensor<T>& template_tokens, std::uint64_t video_id) {
  return {template_tokens, 0, video_id};
}

template <typename T>
SpatioTemporalState<T> update_state(const SpatioTemporalState<T>& state, const Tensor<T>& template_tokens,
                                    const Tensor<T>& search_tokens,
                                    const SpatioTemporalEncoderParams<T>& params, T ln_eps) {
  Tensor<T> next = spatio_temporal_encode(state.tokens, template_tokens, search_tokens, params, ln_eps);
  if (next.shape() != state.tokens.shape()) throw ShapeError("update_state: state shape drifted");
  return {std::move(next), state.frame_index + 1, state.video_id};
}

template <typename T>
PromptSet<T> assemble_prompts(const std::optional<Tensor<T>>& multiscale,
                              const std::optional<Tensor<T>>& spatiotemporal) {
  PromptSet<T> set;
  std::vector<Tensor<T>> parts;
  if (multiscale) {
    parts.push_back(*multiscale);
    set.multiscale = multiscale->dim(0);
  }
  if (spatiotemporal) {
    if (multiscale && spatiotemporal->dim(1) != multiscale->dim(1)) {
      throw ShapeError("assemble_prompts: feature dim mismatch");
    }
    parts.push_back(*spatiotemporal);
    set.spatiotemporal = spatiotemporal->dim(0);
  }
  if (parts.size() == 1) set.tokens = parts[0];
  else if (parts.size() == 2) set.tokens = concat_tokens(parts);
  return set;
}

template <typename T>
PromptSet<T> prompts_for_mode(const ModelConfig& cfg, const PromptParams<T>& params,
                              const std::optional<Tensor<T>>& multiscale,
                              const std::optional<Tensor<T>>& spatiotemporal) {
  switch (cfg.prompts) {
    case PromptMode::kNone: return {};
    case PromptMode::kMultiScale: return assemble_prompts<T>(multiscale, std::nullopt);
    case PromptMode::kSpatioTemporal: return assemble_prompts<T>(std::nullopt, spatiotemporal);
    case PromptMode::kBoth: return assemble_prompts<T>(multiscale, spatiotemporal);
    case PromptMode::kLearnable: {
      PromptSet<T> set;
      set.tokens = params.learnable;
      set.learnable = params.learnable.dim(0);
      return set;
    }
  }
  return {};
}

#define EVP_INSTANTIATE_PROMPTS(T)                                                               \
  template struct PromptParams<T>;                                                              \
  template Tensor<T> gen_multiscale_prompt<T>(const ImageCrop&, const PromptParams<T>&,         \
                                              const ModelConfig&);                              \
  template Tensor<T> gen_spatiotemporal_prompt<T>(const Tensor<T>&, const FeedForward<T>&);     \
  template SpatioTemporalState<T> init_state<T>(const Tensor<T>&, std::uint64_t);               \
  template SpatioTemporalState<T> update_state<T>(const SpatioTemporalState<T>&, const Tensor<T>&, \
                                                  const Tensor<T>&,                             \
                                                  const SpatioTemporalEncoderParams<T>&, T);    \
  template PromptSet<T> assemble_prompts<T>(const std::optional<Tensor<T>>&,                    \
                                            const std::optional<Tensor<T>>&);                   \
  template PromptSet<T> prompts_for_mode<T>(const ModelConfig&, const PromptParams<T>&,         \
                                            const std::optional<Tensor<T>>&,                    \
                                            const std::optional<Tensor<T>>&);

EVP_INSTANTIATE_PROMPTS(float)
EVP_INSTANTIATE_PROMPTS(double)

}  // namespace evp
