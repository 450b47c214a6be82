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

#include "evptrack/encoders.hpp"

#include <cmath>

namespace evp {

template <typename T>
EncoderLayerParams<T> EncoderLayerParams<T>::init(const ModelConfig& cfg, Rng& rng) {
  const std::size_t d = cfg.dim;
  EncoderLayerParams p;
  p.norm1 = LayerNormParams<T>::init(d);
  p.qkv = Linear<T>::init(d, 3 * d, cfg.init_std, rng);
  p.proj = Linear<T>::init(d, d, cfg.init_std, rng);
  p.norm2 = LayerNormParams<T>::init(d);
  p.mlp = FeedForward<T>::init(d, cfg.mlp_ratio * d, d, cfg.init_std, rng);
  p.heads = cfg.heads;
  return p;
}

template <typename T>
void EncoderLayerParams<T>::collect(ParameterList<T>& out, const std::string& prefix, ParamGroup group) const {
  norm1.collect(out, prefix + ".norm1", group);
  qkv.collect(out, prefix + ".qkv", group);
  proj.collect(out, prefix + ".proj", group);
  norm2.collect(out, prefix + ".norm2", group);
  mlp.collect(out, prefix + ".mlp", group);
}

template <typename T>
Tensor<T> encoder_layer(const Tensor<T>& tokens, const EncoderLayerParams<T>& params, T ln_eps,
                        AttentionTrace<T>* trace) {
  if (tokens.rank() != 2 || tokens.dim(0) == 0) throw ShapeError("encoder_layer: expected [n, D] tokens");
  const std::size_t d = params.proj.weight.dim(0);
  if (tokens.dim(1) != d) {
    throw ShapeError("encoder_layer: token dim " + std::to_string(tokens.dim(1)) + " != model dim " +
                     std::to_string(d));
  }
  const std::size_t heads = params.heads;
  if (heads == 0 || d % heads != 0) throw ShapeError("encoder_layer: dim not divisible by heads");
  const std::size_t hd = d / heads;
  const T inv_sqrt = T(1) / std::sqrt(static_cast<T>(hd));

  const Tensor<T> qkv = params.qkv(params.norm1(tokens, ln_eps));
  std::vector<Tensor<T>> head_out;
  head_out.reserve(heads);
  for (std::size_t h = 0; h < heads; ++h) {
    const Tensor<T> q = slice_cols(qkv, h * hd, hd);
    const Tensor<T> k = slice_cols(qkv, d + h * hd, hd);
    const Tensor<T> v = slice_cols(qkv, 2 * d + h * hd, hd);
    const Tensor<T> attn = softmax_rows(scale(matmul(q, transpose(k)), inv_sqrt));
    if (trace) trace->weights.push_back(attn);
    head_out.push_back(matmul(attn, v));
  }
  const Tensor<T> mixed = heads == 1 ? head_out[0] : concat_cols(head_out);
  const Tensor<T> x = add(tokens, params.proj(mixed));
  return add(x, params.mlp(params.norm2(x, ln_eps)));
}

template <typename T>
Tensor<T> FusedTokens<T>::prompt_part() const {
  if (segments.prompts == 0) return {};
  return slice_rows(tokens, 0, segments.prompts);
}

template <typename T>
Tensor<T> FusedTokens<T>::template_part() const {
  return slice_rows(tokens, segments.prompts, segments.template_tokens);
}

template <typename T>
Tensor<T> FusedTokens<T>::search_part() const {
  return slice_rows(tokens, segments.prompts + segments.template_tokens, segments.search_tokens);
}

template <typename T>
ImagePromptEncoderParams<T> ImagePromptEncoderParams<T>::init(const ModelConfig& cfg, Rng& rng) {
  ImagePromptEncoderParams p;
  for (std::size_t i = 0; i < cfg.depth; ++i) p.layers.push_back(EncoderLayerParams<T>::init(cfg, rng));
  p.final_norm = LayerNormParams<T>::init(cfg.dim);
  return p;
}

template <typename T>
void ImagePromptEncoderParams<T>::collect(ParameterList<T>& out, const std::string& prefix) const {
  for (std::size_t i = 0; i < layers.size(); ++i)
    layers[i].collect(out, prefix + ".layers." + std::to_string(i), ParamGroup::kBackbone);
  final_norm.collect(out, prefix + ".final_norm", ParamGroup::kBackbone);
}

template <typename T>
FusedTokens<T> image_prompt_encode(const Tensor<T>& prompts, const TokenSet<T>& tokens,
                                   const ImagePromptEncoderParams<T>& params, T ln_eps,
                                   AttentionTrace<T>* trace) {
  if (!tokens.search_tokens.defined() || tokens.search_tokens.rank() != 2) {
    throw ShapeError("image_prompt_encode: empty search segment");
  }
  Segments seg;
  seg.prompts = prompts.defined() ? prompts.dim(0) : 0;
  seg.template_tokens = tokens.template_tokens.dim(0);
  seg.search_tokens = tokens.search_tokens.dim(0);

  std::vector<Tensor<T>> parts;
  if (prompts.defined()) parts.push_back(prompts);
  parts.push_back(tokens.template_tokens);
  parts.push_back(tokens.search_tokens);
  Tensor<T> x = concat_tokens(parts);
  for (const auto& layer : params.layers) x = encoder_layer(x, layer, ln_eps, trace);
  return {params.final_norm(x, ln_eps), seg};
}

template <typename T>
SpatioTemporalEncoderParams<T> SpatioTemporalEncoderParams<T>::init(const ModelConfig& cfg, Rng& rng) {
  SpatioTemporalEncoderParams p;
  p.input_norm = LayerNormParams<T>::init(cfg.dim);
  for (std::size_t i = 0; i < cfg.st_depth; ++i) p.layers.push_back(EncoderLayerParams<T>::init(cfg, rng));
  return p;
}

template <typename T>
void SpatioTemporalEncoderParams<T>::collect(ParameterList<T>& out, const std::string& prefix) const {
  input_norm.collect(out, prefix + ".input_norm", ParamGroup::kOther);
  for (std::size_t i = 0; i < layers.size(); ++i)
    layers[i].collect(out, prefix + ".layers." + std::to_string(i), ParamGroup::kOther);
}

template <typename T>
Tensor<T> spatio_temporal_encode(const Tensor<T>& state, const Tensor<T>& template_tokens,
                                 const Tensor<T>& search_tokens,
                                 const SpatioTemporalEncoderParams<T>& params, T ln_eps,
                                 AttentionTrace<T>* trace) {
  if (state.shape() != template_tokens.shape()) {
    throw ShapeError("spatio_temporal_encode: state shape " + shape_str(state.shape()) +
                     " differs from template shape " + shape_str(template_tokens.shape()));
  }
  const std::size_t nz = state.dim(0);
  Tensor<T> x = params.input_norm(concat_tokens({state, template_tokens, search_tokens}), ln_eps);
  for (const auto& layer : params.layers) x = encoder_layer(x, layer, ln_eps, trace);
  return slice_rows(x, nz, nz);
}

#define EVP_INSTANTIATE_ENCODERS(T)                                                              \
  template struct EncoderLayerParams<T>;                                                        \
  template struct FusedTokens<T>;                                                               \
  template struct ImagePromptEncoderParams<T>;                                                  \
  template struct SpatioTemporalEncoderParams<T>;                                               \
  template Tensor<T> encoder_layer<T>(const Tensor<T>&, const EncoderLayerParams<T>&, T,        \
                                      AttentionTrace<T>*);                                      \
  template FusedTokens<T> image_prompt_encode<T>(const Tensor<T>&, const TokenSet<T>&,          \
                                                 const ImagePromptEncoderParams<T>&, T,         \
                                                 AttentionTrace<T>*);                           \
  template Tensor<T> spatio_temporal_encode<T>(const Tensor<T>&, const Tensor<T>&,              \
                                               const Tensor<T>&,                                \
                                               const SpatioTemporalEncoderParams<T>&, T,        \
                                               AttentionTrace<T>*);

EVP_INSTANTIATE_ENCODERS(float)
EVP_INSTANTIATE_ENCODERS(double)

}  // namespace evp
