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

#include "evptrack/train.hpp"

#include <cmath>
#include <sstream>

namespace evp {

template <typename T>
AdamW<T>::AdamW(ParameterList<T> params, const TrainConfig& cfg)
    : params_(std::move(params)), beta1_(cfg.beta1), beta2_(cfg.beta2), eps_(cfg.adam_eps),
      weight_decay_(cfg.weight_decay) {
  for (const auto& p : params_) {
    m_.emplace_back(p.tensor.numel(), 0.0);
    v_.emplace_back(p.tensor.numel(), 0.0);
  }
}

template <typename T>
void AdamW<T>::step(double backbone_lr, double other_lr) {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t k = 0; k < params_.size(); ++k) {
    Tensor<T> p = params_[k].tensor;
    if (!p.has_grad()) continue;
    const double lr = params_[k].group == ParamGroup::kBackbone ? backbone_lr : other_lr;
    const double wd = p.rank() >= 2 ? weight_decay_ : 0.0;
    const auto g = p.grad();
    auto w = p.mutable_data();
    auto& m = m_[k];
    auto& v = v_[k];
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double gi = static_cast<double>(g[i]);
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * gi;
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * gi * gi;
      const double update = (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps_) + wd * static_cast<double>(w[i]);
      w[i] = static_cast<T>(static_cast<double>(w[i]) - lr * update);
    }
  }
}

double lr_multiplier(std::size_t step, const TrainConfig& cfg) {
  const auto boundary = static_cast<std::size_t>(std::floor(cfg.decay_fraction * static_cast<double>(cfg.steps)));
  return step >= boundary ? cfg.decay_factor : 1.0;
}

template <typename T>
StepStats train_step(const ModelParams<T>& params, const TrainBatch& batch, AdamW<T>& opt,
                     const TrainConfig& train, const LossConfig& loss, double lr_scale) {
  if (batch.sequences.empty()) throw std::invalid_argument("train_step: empty batch");
  const ParameterList<T> plist = params.parameters();
  for (const auto& p : plist) {
    Tensor<T> t = p.tensor;
    t.zero_grad();
  }

  StepStats stats;
  std::vector<Tensor<T>> seq_means;
  for (const auto& seq : batch.sequences) {
    SequenceLoss<T> sl = sequence_loss(params, seq, loss, train.detach_state);
    seq_means.push_back(sl.mean);
    stats.cls += sl.cls;
    stats.l1 += sl.l1;
    stats.giou += sl.giou;
  }
  // Every sequence has the same length, so the mean of the sequence means is
  // the mean over all N·M frames.
  const double m = static_cast<double>(seq_means.size());
  Tensor<T> total = scale(add_n(seq_means), static_cast<T>(1.0 / m));
  stats.loss = static_cast<double>(total.item());
  stats.cls /= m;
  stats.l1 /= m;
  stats.giou /= m;
  if (!std::isfinite(stats.loss)) {
    std::ostringstream os;
    os << "train_step: non-finite loss (cls " << stats.cls << ", l1 " << stats.l1 << ", giou " << stats.giou << ")";
    throw NumericError(os.str());
  }
  total.backward();

  double sq = 0.0;
  for (const auto& p : plist) {
    if (!p.tensor.has_grad()) continue;
    for (T g : p.tensor.grad()) sq += static_cast<double>(g) * static_cast<double>(g);
  }
  stats.grad_norm = std::sqrt(sq);
  if (!std::isfinite(stats.grad_norm)) throw NumericError("train_step: non-finite gradient norm");
  if (train.grad_clip > 0.0 && stats.grad_norm > train.grad_clip) {
    const T f = static_cast<T>(train.grad_clip / stats.grad_norm);
    for (const auto& p : plist) {
      if (!p.tensor.has_grad()) continue;
      Tensor<T> t = p.tensor;
      for (T& g : t.mutable_grad()) g *= f;
    }
  }
  opt.step(train.backbone_lr * lr_scale, train.lr * lr_scale);
  return stats;
}

TrainResult train_loop(const RunConfig& cfg, std::span<const VideoSequence> dataset, const TrainHooks& hooks) {
  return train_loop(cfg, ModelParams<float>::init(cfg.model, cfg.train.seed), dataset, hooks);
}

TrainResult train_loop(const RunConfig& cfg, ModelParams<float> params, std::span<const VideoSequence> dataset,
                       const TrainHooks& hooks) {
  const TrainConfig& tc = cfg.train;
  AdamW<float> opt(params.parameters(), tc);
  Rng rng = Rng(tc.seed).fork(0x5a4d);
  TrainResult result{params, {}, {}};
  for (std::size_t step = 0; step < tc.steps; ++step) {
    const TrainBatch batch =
        sample_batch(dataset, tc.videos_per_batch, tc.frames_per_video, tc, cfg.model, cfg.tracker, rng);
    const double mult = lr_multiplier(step, tc);
    const StepStats stats = train_step(params, batch, opt, tc, cfg.loss, mult);
    result.loss_trace.push_back(stats.loss);
    result.lr_trace.push_back(tc.lr * mult);
    if (hooks.on_step) hooks.on_step(step, stats);
    const bool last = step + 1 == tc.steps;
    if (hooks.on_checkpoint && (last || (tc.checkpoint_every > 0 && (step + 1) % tc.checkpoint_every == 0))) {
      hooks.on_checkpoint(step + 1, params);
    }
  }
  return result;
}

template class AdamW<float>;
template class AdamW<double>;
template StepStats train_step<float>(const ModelParams<float>&, const TrainBatch&, AdamW<float>&,
                                     const TrainConfig&, const LossConfig&, double);
template StepStats train_step<double>(const ModelParams<double>&, const TrainBatch&, AdamW<double>&,
                                      const TrainConfig&, const LossConfig&, double);

}  // namespace evp
