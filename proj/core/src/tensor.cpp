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

#include "evptrack/tensor.hpp"

#include <cmath>
#include <sstream>
#include <unordered_set>
#include <utility>

namespace evp {

namespace {
thread_local bool g_grad_enabled = true;
}  // namespace

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

template <typename T>
Tensor<T>::Tensor(Shape shape, std::vector<T> data, bool requires_grad) {
  for (std::size_t d : shape) {
    if (d == 0) throw ShapeError("tensor dimensions must be positive, got " + shape_str(shape));
  }
  if (shape_numel(shape) != data.size()) {
    throw ShapeError("shape " + shape_str(shape) + " does not match " +
                     std::to_string(data.size()) + " elements");
  }
  node_ = std::make_shared<detail::Node<T>>();
  node_->shape = std::move(shape);
  node_->data = std::move(data);
  node_->requires_grad = requires_grad;
}

template <typename T>
Tensor<T> Tensor<T>::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), T(0), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::full(Shape shape, T value, bool requires_grad) {
  const std::size_t n = shape_numel(shape);
  return Tensor(std::move(shape), std::vector<T>(n, value), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::scalar(T value, bool requires_grad) {
  return Tensor(Shape{1}, std::vector<T>{value}, requires_grad);
}

template <typename T>
const detail::Node<T>& Tensor<T>::checked() const {
  if (!node_) throw std::logic_error("use of undefined tensor");
  return *node_;
}

template <typename T>
detail::Node<T>& Tensor<T>::checked() {
  if (!node_) throw std::logic_error("use of undefined tensor");
  return *node_;
}

template <typename T>
const Shape& Tensor<T>::shape() const {
  return checked().shape;
}

template <typename T>
std::size_t Tensor<T>::dim(std::size_t axis) const {
  const Shape& s = shape();
  if (axis >= s.size()) throw ShapeError("axis out of range for shape " + shape_str(s));
  return s[axis];
}

template <typename T>
std::size_t Tensor<T>::numel() const {
  return checked().data.size();
}

template <typename T>
std::span<const T> Tensor<T>::data() const {
  return checked().data;
}

template <typename T>
std::span<T> Tensor<T>::mutable_data() {
  return checked().data;
}

template <typename T>
bool Tensor<T>::requires_grad() const {
  return checked().requires_grad;
}

template <typename T>
void Tensor<T>::set_requires_grad(bool on) {
  auto& n = checked();
  if (!n.is_leaf) throw std::logic_error("requires_grad can only be toggled on leaves");
  n.requires_grad = on;
}

template <typename T>
bool Tensor<T>::has_grad() const {
  const auto& n = checked();
  return !n.grad.empty();
}

template <typename T>
std::span<const T> Tensor<T>::grad() const {
  return checked().grad;
}

template <typename T>
std::span<T> Tensor<T>::mutable_grad() {
  return checked().ensure_grad();
}

template <typename T>
void Tensor<T>::zero_grad() {
  auto& n = checked();
  std::fill(n.grad.begin(), n.grad.end(), T(0));
}

template <typename T>
T Tensor<T>::item() const {
  const auto& n = checked();
  if (n.data.size() != 1) throw ShapeError("item() on tensor of shape " + shape_str(n.shape));
  return n.data[0];
}

template <typename T>
T Tensor<T>::at(std::size_t i) const {
  const auto& n = checked();
  if (i >= n.data.size()) throw ShapeError("flat index out of range");
  return n.data[i];
}

template <typename T>
T Tensor<T>::at(std::size_t i, std::size_t j) const {
  const auto& n = checked();
  if (n.shape.size() != 2 || i >= n.shape[0] || j >= n.shape[1]) {
    throw ShapeError("2-D index out of range for shape " + shape_str(n.shape));
  }
  return n.data[i * n.shape[1] + j];
}

template <typename T>
Tensor<T> Tensor<T>::detach() const {
  const auto& n = checked();
  return Tensor(n.shape, n.data, false);
}

template <typename T>
void Tensor<T>::backward() const {
  const auto& root = checked();
  if (root.data.size() != 1) {
    throw ShapeError("backward() requires a scalar, got shape " + shape_str(root.shape));
  }
  if (!root.requires_grad) return;

  // Post-order DFS over parents, iteratively; reverse gives a valid tape order.
  std::vector<detail::Node<T>*> order;
  std::unordered_set<const detail::Node<T>*> seen;
  std::vector<std::pair<detail::Node<T>*, std::size_t>> stack;
  stack.emplace_back(node_.get(), 0);
  seen.insert(node_.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      detail::Node<T>* p = node->parents[next++].get();
      if (p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  node_->ensure_grad()[0] += T(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::Node<T>* node = *it;
    if (node->is_leaf || !node->backward || node->grad.empty()) continue;
    node->backward(*node);
    // Intermediate gradients are consumed; repeated backward() calls then
    // accumulate into leaves only.
    node->grad.clear();
    node->grad.shrink_to_fit();
  }
}

template class Tensor<float>;
template class Tensor<double>;

}  // namespace evp
