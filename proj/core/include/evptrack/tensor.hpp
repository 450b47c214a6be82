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
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace evp {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

/// Raised when operand shapes are incompatible with an operation.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a forward op produces NaN or Inf.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Precision { kFloat32, kFloat64 };

namespace detail {

template <typename T>
struct Node {
  Shape shape;
  std::vector<T> data;
  std::vector<T> grad;  // empty until something accumulates into it
  bool requires_grad = false;
  bool is_leaf = true;
  const char* op = "leaf";
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;

  std::vector<T>& ensure_grad() {
    if (grad.size() != data.size()) grad.assign(data.size(), T(0));
    return grad;
  }
};

}  // namespace detail

/// Whether newly created op results record history. Thread-local.
bool grad_enabled();

/// Disables history recording for the lifetime of the guard.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

/// Dense row-major array with reverse-mode autodiff.
///
/// A Tensor is a cheap handle; copies share the same storage. Results of ops
/// are immutable. Leaves created with `requires_grad` collect gradients when
/// `backward()` is called on a scalar that depends on them.
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;
  Tensor(Shape shape, std::vector<T> data, bool requires_grad = false);
  explicit Tensor(std::shared_ptr<detail::Node<T>> node) : node_(std::move(node)) {}

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, T value, bool requires_grad = false);
  static Tensor scalar(T value, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const;

  std::span<const T> data() const;
  /// Writable storage. Intended for parameters and optimizers only.
  std::span<T> mutable_data();

  bool requires_grad() const;
  void set_requires_grad(bool on);
  bool has_grad() const;
  std::span<const T> grad() const;
  std::span<T> mutable_grad();
  void zero_grad();

  T item() const;
  T at(std::size_t i) const;
  T at(std::size_t i, std::size_t j) const;

  /// Copy of the values with no history.
  Tensor detach() const;

  /// Accumulates d(this)/d(leaf) into every grad-requiring leaf.
  void backward() const;

  const std::shared_ptr<detail::Node<T>>& node() const { return node_; }

 private:
  const detail::Node<T>& checked() const;
  detail::Node<T>& checked();

  std::shared_ptr<detail::Node<T>> node_;
};

/// Converts between precisions, dropping history.
template <typename To, typename From>
Tensor<To> cast(const Tensor<From>& t) {
  std::vector<To> out(t.data().begin(), t.data().end());
  return Tensor<To>(t.shape(), std::move(out), false);
}

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace evp
