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

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "evptrack/config.hpp"
#include "evptrack/embeddings.hpp"
#include "evptrack/layers.hpp"

namespace evp {

/// Pre-norm transformer block: x + MHSA(LN(x)), then + MLP(LN(.)).
template <typename T>
struct EncoderLayerParams {
  LayerNormParams<T> norm1;
  Linear<T> qkv;   // [D, 3D]
  Linear<T> proj;  // [D, D]
  LayerNormParams<T> norm2;
  FeedForward<T> mlp;
  std::size_t heads = 1;

  static EncoderLayerParams init(const ModelConfig& cfg, Rng& rng);
  void collect(ParameterList<T>& out, const std::string& prefix, ParamGroup group) const;
};

/// Collects every softmax matrix computed during a forward pass, one per
/// layer and head, in evaluation order.
template <typename T>
struct AttentionTrace {
  std::vector<Tensor<T>> weights;
};

template <typename T>
Tensor<T> encoder_layer(const Tensor<T>& tokens, const EncoderLayerParams<T>& params, T ln_eps,
                        AttentionTrace<T>* trace = nullptr);

struct Segments {
  std::size_t prompts = 0;
  std::size_t template_tokens = 0;
  std::size_t search_tokens = 0;

  std::size_t total() const { return prompts + template_tokens + search_tokens; }
};

/// Encoder output with its (prompt | template | search) layout.
template <typename T>
struct FusedTokens {
  Tensor<T> tokens;
  Segments segments;

  /// Undefined tensor when there are no prompts.
  Tensor<T> prompt_part() const;
  Tensor<T> template_part() const;
  Tensor<T> search_part() const;
};

template <typename T>
struct ImagePromptEncoderParams {
  std::vector<EncoderLayerParams<T>> layers;
  LayerNormParams<T> final_norm;

  static ImagePromptEncoderParams init(const ModelConfig& cfg, Rng& rng);
  void collect(ParameterList<T>& out, const std::string& prefix) const;
};

/// concat(prompts, f_z, f_x) -> N layers -> final layer norm.
/// `prompts` may be undefined (baseline without prompts).
template <typename T>
FusedTokens<T> image_prompt_encode(const Tensor<T>& prompts, const TokenSet<T>& tokens,
                                   const ImagePromptEncoderParams<T>& params, T ln_eps,
                                   AttentionTrace<T>* trace = nullptr);

template <typename T>
struct SpatioTemporalEncoderParams {
  LayerNormParams<T> input_norm;
  std::vector<EncoderLayerParams<T>> layers;

  static SpatioTemporalEncoderParams init(const ModelConfig& cfg, Rng& rng);
  void collect(ParameterList<T>& out, const std::string& prefix) const;
};

/// LN(concat(f_{t-1}, f_z, f_x)) through the temporal layers; the output rows
/// at the template positions become the next state f_t.
template <typename T>
Tensor<T> spatio_temporal_encode(const Tensor<T>& state, const Tensor<T>& template_tokens,
                                 const Tensor<T>& search_tokens,
                                 const SpatioTemporalEncoderParams<T>& params, T ln_eps,
                                 AttentionTrace<T>* trace = nullptr);

}  // namespace evp
