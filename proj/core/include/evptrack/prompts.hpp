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
#include <optional>
#include <string>

#include "evptrack/config.hpp"
#include "evptrack/embeddings.hpp"
#include "evptrack/encoders.hpp"
#include "evptrack/layers.hpp"

namespace evp {

template <typename T>
struct PromptParams {
  std::array<Tensor<T>, 3> scale_proj;  // E_P for each configured P: [3*P*P, D]
  FeedForward<T> multiscale_ffn;        // D -> mlp_ratio*D -> D
  FeedForward<T> spatiotemporal_ffn;    // D -> mlp_ratio*D -> D
  Tensor<T> learnable;                  // [learnable_tokens, D], only in learnable mode

  static PromptParams init(const ModelConfig& cfg, Rng& rng);
  void collect(ParameterList<T>& out, const std::string& prefix) const;
};

/// Explicit prompt tokens in (multi-scale, spatio-temporal) order. `tokens` is
/// undefined when the set is empty.
template <typename T>
struct PromptSet {
  Tensor<T> tokens;
  std::size_t multiscale = 0;
  std::size_t spatiotemporal = 0;
  std::size_t learnable = 0;

  std::size_t size() const { return multiscale + spatiotemporal + learnable; }
};

/// Propagated token block f_t of one video.
template <typename T>
struct SpatioTemporalState {
  Tensor<T> tokens;  // [N_z, D]
  std::size_t frame_index = 0;
  std::uint64_t video_id = 0;
};

/// One token per scale: patchify at P, average over the G² tiles, then the
/// shared FFN applied per token. Returns [3, D].
template <typename T>
Tensor<T> gen_multiscale_prompt(const ImageCrop& tmpl, const PromptParams<T>& params, const ModelConfig& cfg);

/// mean over state tokens -> FFN. Returns [1, D].
template <typename T>
Tensor<T> gen_spatiotemporal_prompt(const Tensor<T>& state, const FeedForward<T>& ffn);

/// f_0 = f_z: a bitwise copy of the template tokens at frame 0.
template <typename T>
SpatioTemporalState<T> init_state(const Tensor<T>& template_tokens, std::uint64_t video_id);

/// Runs the temporal encoder and advances the frame counter. Always applied;
/// there is no gating.
template <typename T>
SpatioTemporalState<T> update_state(const SpatioTemporalState<T>& state, const Tensor<T>& template_tokens,
                                    const Tensor<T>& search_tokens,
                                    const SpatioTemporalEncoderParams<T>& params, T ln_eps);

template <typename T>
PromptSet<T> assemble_prompts(const std::optional<Tensor<T>>& multiscale,
                              const std::optional<Tensor<T>>& spatiotemporal);

/// Prompt tokens for the given mode; learnable mode returns the parameter tokens.
template <typename T>
PromptSet<T> prompts_for_mode(const ModelConfig& cfg, const PromptParams<T>& params,
                              const std::optional<Tensor<T>>& multiscale,
                              const std::optional<Tensor<T>>& spatiotemporal);

}  // namespace evp
