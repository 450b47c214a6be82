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
#include <string>

#include "evptrack/checkpoint.hpp"
#include "evptrack/ops.hpp"
#include "evptrack/rng.hpp"
#include "evptrack/tensor.hpp"

// Small parameter blocks shared by the encoders, prompt generators and head.

namespace evp {

template <typename T>
Tensor<T> init_truncated_normal(Shape shape, double std, Rng& rng) {
  std::vector<T> v(shape_numel(shape));
  for (auto& x : v) x = static_cast<T>(std * rng.truncated_normal());
  return Tensor<T>(std::move(shape), std::move(v), true);
}

template <typename T>
struct Linear {
  Tensor<T> weight;  // [in, out]
  Tensor<T> bias;    // [out]

  static Linear init(std::size_t in, std::size_t out, double std, Rng& rng) {
    return {init_truncated_normal<T>({in, out}, std, rng), Tensor<T>::zeros({out}, true)};
  }
  Tensor<T> operator()(const Tensor<T>& x) const { return add_rowwise(matmul(x, weight), bias); }
  void collect(ParameterList<T>& out, const std::string& prefix, ParamGroup group) const {
    out.push_back({prefix + ".weight", weight, group});
    out.push_back({prefix + ".bias", bias, group});
  }
};

template <typename T>
struct LayerNormParams {
  Tensor<T> gamma;
  Tensor<T> beta;

  static LayerNormParams init(std::size_t d) {
    return {Tensor<T>::full({d}, T(1), true), Tensor<T>::zeros({d}, true)};
  }
  Tensor<T> operator()(const Tensor<T>& x, T eps) const { return layer_norm(x, gamma, beta, eps); }
  void collect(ParameterList<T>& out, const std::string& prefix, ParamGroup group) const {
    out.push_back({prefix + ".gamma", gamma, group});
    out.push_back({prefix + ".beta", beta, group});
  }
};

/// Two-layer per-token MLP with a GELU in between.
template <typename T>
struct FeedForward {
  Linear<T> fc1;
  Linear<T> fc2;

  static FeedForward init(std::size_t in, std::size_t hidden, std::size_t out, double std, Rng& rng) {
    auto fc1 = Linear<T>::init(in, hidden, std, rng);
    auto fc2 = Linear<T>::init(hidden, out, std, rng);
    return {std::move(fc1), std::move(fc2)};
  }
  Tensor<T> operator()(const Tensor<T>& x) const { return fc2(gelu(fc1(x))); }
  void collect(ParameterList<T>& out, const std::string& prefix, ParamGroup group) const {
    fc1.collect(out, prefix + ".fc1", group);
    fc2.collect(out, prefix + ".fc2", group);
  }
};

}  // namespace evp
