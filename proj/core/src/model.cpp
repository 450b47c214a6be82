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

#include "evptrack/model.hpp"

#include <stdexcept>

#include "evptrack/errors.hpp"

namespace evp {

template <typename T>
ModelParams<T> ModelParams<T>::init(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  ModelParams p;
  p.config = cfg;
  p.embed = EmbeddingParams<T>::init(cfg, rng);
  p.encoder = ImagePromptEncoderParams<T>::init(cfg, rng);
  p.prompts = PromptParams<T>::init(cfg, rng);
  p.temporal = SpatioTemporalEncoderParams<T>::init(cfg, rng);
  p.head = HeadParams<T>::init(cfg, rng);
  return p;
}

template <typename T>
ParameterList<T> ModelParams<T>::parameters() const {
  ParameterList<T> out;
  embed.collect(out, "embed");
  encoder.collect(out, "encoder");
  prompts.collect(out, "prompts");
  temporal.collect(out, "temporal");
  head.collect(out, "head");
  return out;
}

template <typename T>
Tensor<T> embed_crop(const ModelParams<T>& params, const ImageCrop& crop) {
  const ImageCrop std_crop{standardize(crop.pixels, params.config.pixel_mean, params.config.pixel_std), crop.kind};
  return patch_embed(std_crop, params.embed, params.config);
}

template <typename T>
TemplateContext<T> prepare_template(const ModelParams<T>& params, const ImageCrop& tmpl) {
  if (tmpl.kind != CropKind::kTemplate) throw std::invalid_argument("prepare_template: crop is not a template");
  const auto& cfg = params.config;
  const ImageCrop std_crop{standardize(tmpl.pixels, cfg.pixel_mean, cfg.pixel_std), tmpl.kind};
  TemplateContext<T> ctx;
  ctx.tokens = patch_embed(std_crop, params.embed, cfg);
  if (cfg.uses_multiscale()) ctx.multiscale = gen_multiscale_prompt(std_crop, params.prompts, cfg);
  return ctx;
}

template <typename T>
FrameOutput<T> forward_frame(const ModelParams<T>& params, const TemplateContext<T>& ctx,
                             const SpatioTemporalState<T>& state, const ImageCrop& search,
                             AttentionTrace<T>* trace) {
  if (search.kind != CropKind::kSearch) throw std::invalid_argument("forward_frame: crop is not a search region");
  const auto& cfg = params.config;
  const T eps = static_cast<T>(cfg.ln_eps);
  const Tensor<T> fx = embed_crop(params, search);

  std::optional<Tensor<T>> st;
  if (cfg.uses_spatiotemporal()) st = gen_spatiotemporal_prompt(state.tokens, params.prompts.spatiotemporal_ffn);
  const PromptSet<T> prompts = prompts_for_mode(cfg, params.prompts, ctx.multiscale, st);

  const FusedTokens<T> fused = image_prompt_encode(prompts.tokens, TokenSet<T>{ctx.tokens, fx}, params.encoder, eps, trace);

  FrameOutput<T> out;
  out.segments = fused.segments;
  out.head = head_forward(fused.search_part(), params.head);
  if (cfg.state_input == StateInput::kFused) {
    out.next_state = update_state(state, fused.template_part(), fused.search_part(), params.temporal, eps);
  } else {
    out.next_state = update_state(state, ctx.tokens, fx, params.temporal, eps);
  }
  return out;
}

template <typename T>
SequenceLoss<T> sequence_loss(const ModelParams<T>& params, const TrainingSequence& seq,
                              const LossConfig& loss, bool detach_state) {
  if (seq.search.empty() || seq.search.size() != seq.targets.size()) {
    throw std::invalid_argument("sequence_loss: need one target per search crop");
  }
  const TemplateContext<T> ctx = prepare_template(params, seq.template_crop);
  SpatioTemporalState<T> state = init_state(ctx.tokens, seq.video_id);
  SequenceLoss<T> result;
  std::vector<Tensor<T>> totals;
  for (std::size_t k = 0; k < seq.search.size(); ++k) {
    if (detach_state) state.tokens = state.tokens.detach();
    result.consumed_state.push_back(state.frame_index);
    FrameOutput<T> out = forward_frame(params, ctx, state, seq.search[k]);
    const LossTerms<T> terms = total_loss(out.head, seq.targets[k], loss);
    result.frame_total.push_back(static_cast<double>(terms.total.item()));
    result.cls += static_cast<double>(terms.cls.item());
    result.l1 += static_cast<double>(terms.l1.item());
    result.giou += static_cast<double>(terms.giou.item());
    totals.push_back(terms.total);
    state = std::move(out.next_state);
  }
  const double n = static_cast<double>(totals.size());
  result.mean = scale(add_n(totals), static_cast<T>(1.0 / n));
  result.cls /= n;
  result.l1 /= n;
  result.giou /= n;
  return result;
}

template <typename To, typename From>
ModelParams<To> convert_params(const ModelParams<From>& src) {
  ModelParams<To> dst = ModelParams<To>::init(src.config, 0);
  restore(dst.parameters(), snapshot(src.parameters()));
  return dst;
}

std::string checkpoint_metadata(const ModelConfig& cfg) { return model_config_to_json(cfg); }

template <typename T>
Checkpoint save_model(const ModelParams<T>& params) {
  return snapshot(params.parameters(), checkpoint_metadata(params.config));
}

template <typename T>
ModelParams<T> load_model(const Checkpoint& ckpt) {
  if (ckpt.metadata.empty()) throw FormatError("checkpoint has no model config metadata");
  ModelParams<T> params = ModelParams<T>::init(model_config_from_json(ckpt.metadata), 0);
  restore(params.parameters(), ckpt);
  return params;
}

#define EVP_INSTANTIATE_MODEL(T)                                                                 \
  template struct ModelParams<T>;                                                               \
  template Tensor<T> embed_crop<T>(const ModelParams<T>&, const ImageCrop&);                    \
  template TemplateContext<T> prepare_template<T>(const ModelParams<T>&, const ImageCrop&);     \
  template FrameOutput<T> forward_frame<T>(const ModelParams<T>&, const TemplateContext<T>&,    \
                                           const SpatioTemporalState<T>&, const ImageCrop&,     \
                                           AttentionTrace<T>*);                                 \
  template SequenceLoss<T> sequence_loss<T>(const ModelParams<T>&, const TrainingSequence&,     \
                                            const LossConfig&, bool);                           \
  template Checkpoint save_model<T>(const ModelParams<T>&);                                     \
  template ModelParams<T> load_model<T>(const Checkpoint&);

EVP_INSTANTIATE_MODEL(float)
EVP_INSTANTIATE_MODEL(double)

template ModelParams<double> convert_params<double, float>(const ModelParams<float>&);
template ModelParams<float> convert_params<float, double>(const ModelParams<double>&);
template ModelParams<float> convert_params<float, float>(const ModelParams<float>&);
template ModelParams<double> convert_params<double, double>(const ModelParams<double>&);

}  // namespace evp
