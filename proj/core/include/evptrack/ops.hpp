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
#include <span>
#include <vector>

#include "evptrack/tensor.hpp"

// Differentiable tensor operations. Every op checks operand shapes (ShapeError)
// and rejects non-finite results (NumericError).

namespace evp {

// Elementwise
template <typename T> Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> scale(const Tensor<T>& a, T factor);
template <typename T> Tensor<T> add_scalar(const Tensor<T>& a, T value);
/// a[..., d] + b[d], broadcast over leading axes.
template <typename T> Tensor<T> add_rowwise(const Tensor<T>& a, const Tensor<T>& b);
/// Sum of equally shaped tensors, accumulated in argument order.
template <typename T> Tensor<T> add_n(std::span<const Tensor<T>> parts);

template <typename T> Tensor<T> gelu(const Tensor<T>& a);
template <typename T> Tensor<T> sigmoid(const Tensor<T>& a);
template <typename T> Tensor<T> exp(const Tensor<T>& a);
template <typename T> Tensor<T> log(const Tensor<T>& a);
template <typename T> Tensor<T> abs(const Tensor<T>& a);
template <typename T> Tensor<T> clamp(const Tensor<T>& a, T lo, T hi);

// Layout
template <typename T> Tensor<T> reshape(const Tensor<T>& a, Shape shape);
template <typename T> Tensor<T> transpose(const Tensor<T>& a);
template <typename T> Tensor<T> concat_tokens(std::span<const Tensor<T>> parts);
template <typename T> std::vector<Tensor<T>> split_tokens(const Tensor<T>& a, std::span<const std::size_t> sizes);
template <typename T> Tensor<T> slice_rows(const Tensor<T>& a, std::size_t begin, std::size_t count);
template <typename T> Tensor<T> concat_cols(std::span<const Tensor<T>> parts);
template <typename T> Tensor<T> slice_cols(const Tensor<T>& a, std::size_t begin, std::size_t count);
/// Picks flat elements of `a` into a 1-D tensor.
template <typename T> Tensor<T> gather(const Tensor<T>& a, std::span<const std::size_t> flat_indices);

// Linear algebra and reductions
template <typename T> Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b);
/// Softmax along the last axis, max-subtracted.
template <typename T> Tensor<T> softmax_rows(const Tensor<T>& a);
/// Normalizes each vector along the last axis, then applies gamma/beta.
template <typename T>
Tensor<T> layer_norm(const Tensor<T>& a, const Tensor<T>& gamma, const Tensor<T>& beta, T eps);
/// Mean over the token axis: [n, d] -> [1, d].
template <typename T> Tensor<T> mean_pool(const Tensor<T>& a);
template <typename T> Tensor<T> sum(const Tensor<T>& a);
template <typename T> Tensor<T> mean(const Tensor<T>& a);

// Convenience overloads for brace-initialized part lists.
template <typename T>
Tensor<T> concat_tokens(std::initializer_list<Tensor<T>> parts) {
  return concat_tokens<T>(std::span<const Tensor<T>>(parts.begin(), parts.size()));
}
template <typename T>
Tensor<T> concat_tokens(const std::vector<Tensor<T>>& parts) {
  return concat_tokens<T>(std::span<const Tensor<T>>(parts));
}
template <typename T>
Tensor<T> concat_cols(const std::vector<Tensor<T>>& parts) {
  return concat_cols<T>(std::span<const Tensor<T>>(parts));
}
template <typename T>
Tensor<T> add_n(const std::vector<Tensor<T>>& parts) {
  return add_n<T>(std::span<const Tensor<T>>(parts));
}
template <typename T>
std::vector<Tensor<T>> split_tokens(const Tensor<T>& a, const std::vector<std::size_t>& sizes) {
  return split_tokens<T>(a, std::span<const std::size_t>(sizes));
}
template <typename T>
Tensor<T> gather(const Tensor<T>& a, const std::vector<std::size_t>& idx) {
  return gather<T>(a, std::span<const std::size_t>(idx));
}

namespace detail {

/// Builds an op result. History is attached only when grad mode is on and an
/// input requires grad. Throws NumericError if `data` has non-finite values.
template <typename T>
Tensor<T> make_result(const char* op, Shape shape, std::vector<T> data,
                      std::vector<Tensor<T>> inputs, std::function<void(Node<T>&)> backward);

/// Gradient buffer of the i-th parent, or nullptr if it does not need one.
template <typename T>
std::vector<T>* parent_grad(Node<T>& out, std::size_t i) {
  auto& p = *out.parents[i];
  return p.requires_grad ? &p.ensure_grad() : nullptr;
}

}  // namespace detail

}  // namespace evp
