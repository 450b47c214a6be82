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
#include <functional>
#include <span>
#include <vector>

#include "evptrack/config.hpp"
#include "evptrack/model.hpp"
#include "evptrack/sampling.hpp"

namespace evp {

/// Adam with decoupled weight decay. Decay applies to matrices only; biases,
/// norm parameters and 1-D tensors are not decayed.
template <typename T>
class AdamW {
 public:
  AdamW(ParameterList<T> params, const TrainConfig& cfg);

  /// One update from the gradients currently stored on the parameters.
  void step(double backbone_lr, double other_lr);
  std::size_t steps_taken() const { return t_; }
  const ParameterList<T>& parameters() const { return params_; }

 private:
  ParameterList<T> params_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  double beta1_, beta2_, eps_, weight_decay_;
  std::size_t t_ = 0;
};

struct StepStats {
  double loss = 0.0;
  double cls = 0.0;
  double l1 = 0.0;
  double giou = 0.0;
  double grad_norm = 0.0;  // before clipping
};

/// Multiplier on the base learning rates at `step`: 1 before the decay
/// boundary floor(decay_fraction·steps), decay_factor from then on.
double lr_multiplier(std::size_t step, const TrainConfig& cfg);

/// Clears gradients, runs every sequence of the batch, backpropagates the
/// mean loss over the N·M frames, clips and applies one optimizer update.
template <typename T>
StepStats train_step(const ModelParams<T>& params, const TrainBatch& batch, AdamW<T>& opt,
                     const TrainConfig& train, const LossConfig& loss, double lr_scale = 1.0);

struct TrainResult {
  ModelParams<float> params;
  std::vector<double> loss_trace;
  std::vector<double> lr_trace;  // other-group learning rate per step
};

struct TrainHooks {
  /// Called after each step.
  std::function<void(std::size_t step, const StepStats&)> on_step;
  /// Called every checkpoint_every steps (if nonzero) and after the last step.
  std::function<void(std::size_t step, const ModelParams<float>&)> on_checkpoint;
};

/// Trains a fresh float model (initialized from train.seed) on `dataset`.
TrainResult train_loop(const RunConfig& cfg, std::span<const VideoSequence> dataset, const TrainHooks& hooks = {});

/// Continues training an existing model.
TrainResult train_loop(const RunConfig& cfg, ModelParams<float> params, std::span<const VideoSequence> dataset,
                       const TrainHooks& hooks = {});

}  // namespace evp
