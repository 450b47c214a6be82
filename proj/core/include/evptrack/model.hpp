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
#include <optional>
#include <vector>

#include "evptrack/bbox.hpp"
#include "evptrack/checkpoint.hpp"
#include "evptrack/config.hpp"
#include "evptrack/embeddings.hpp"
#include "evptrack/encoders.hpp"
#include "evptrack/head_loss.hpp"
#include "evptrack/prompts.hpp"

namespace evp {

template <typename T>
struct ModelParams {
  ModelConfig config;
  EmbeddingParams<T> embed;
  ImagePromptEncoderParams<T> encoder;
  PromptParams<T> prompts;
  SpatioTemporalEncoderParams<T> temporal;
  HeadParams<T> head;

  static ModelParams init(const ModelConfig& cfg, std::uint64_t seed);
  /// Every trainable tensor with its archive path, in a fixed order.
  ParameterList<T> parameters() const;
};

/// Per-video artifacts computed once from the template crop.
template <typename T>
struct TemplateContext {
  Tensor<T> tokens;                     // f_z [N_z, D]
  std::optional<Tensor<T>> multiscale;  // [3, D] when the mode uses it
};

template <typename T>
struct FrameOutput {
  HeadOutput<T> head;
  SpatioTemporalState<T> next_state;
  Segments segments;
};

/// Standardizes the crop and embeds it according to its kind.
template <typename T>
Tensor<T> embed_crop(const ModelParams<T>& params, const ImageCrop& crop);

template <typename T>
TemplateContext<T> prepare_template(const ModelParams<T>& params, const ImageCrop& tmpl);

/// One tracking step: prompts from the cached template context and the
/// incoming state, fusion encoder, head, then the state update. The update is
/// computed for every frame regardless of the prompt mode.
template <typename T>
FrameOutput<T> forward_frame(const ModelParams<T>& params, const TemplateContext<T>& ctx,
                             const SpatioTemporalState<T>& state, const ImageCrop& search,
                             AttentionTrace<T>* trace = nullptr);

/// One video worth of training data: a template crop and N search crops in
/// frame order, with targets normalized to each search crop.
struct TrainingSequence {
  ImageCrop template_crop;
  std::vector<ImageCrop> search;
  std::vector<BBox> targets;
  std::vector<std::size_t> frame_indices;
  std::uint64_t video_id = 0;
};

template <typename T>
struct SequenceLoss {
  Tensor<T> mean;                   // mean total loss over the sequence's frames
  std::vector<double> frame_total;  // per-frame totals, for reporting
  double cls = 0.0;                 // means of the components
  double l1 = 0.0;
  double giou = 0.0;
  /// frame_index of the state consumed by each frame, for ordering checks.
  std::vector<std::size_t> consumed_state;
};

/// Runs the sequence frame by frame, carrying the state. With `detach_state`
/// the state is cut from the graph before each frame consumes it.
template <typename T>
SequenceLoss<T> sequence_loss(const ModelParams<T>& params, const TrainingSequence& seq,
                              const LossConfig& loss, bool detach_state);

/// Copies parameter values across precisions (through a float snapshot).
template <typename To, typename From>
ModelParams<To> convert_params(const ModelParams<From>& src);

std::string checkpoint_metadata(const ModelConfig& cfg);

template <typename T>
Checkpoint save_model(const ModelParams<T>& params);

/// Rebuilds a model from a checkpoint, taking the config from its metadata.
template <typename T>
ModelParams<T> load_model(const Checkpoint& ckpt);

}  // namespace evp
