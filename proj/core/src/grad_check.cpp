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

#include "evptrack/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "evptrack/rng.hpp"

namespace evp {

namespace {

std::vector<std::size_t> pick_coords(std::size_t n, std::size_t max_coords, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (max_coords == 0 || max_coords >= n) return idx;
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < max_coords; ++i) std::swap(idx[i], idx[i + rng.index(n - i)]);
  idx.resize(max_coords);
  std::sort(idx.begin(), idx.end());
  return idx;
}

template <typename T>
T evaluate(const std::function<Tensor<T>()>& f) {
  NoGradGuard guard;
  const Tensor<T> y = f();
  return y.item();
}

}  // namespace

template <typename T>
GradCheckResult grad_check_leaves(const std::function<Tensor<T>()>& f,
                                  const std::vector<std::pair<std::string, Tensor<T>>>& leaves,
                                  const GradCheckOptions& options) {
  std::vector<Tensor<T>> xs;
  for (const auto& [name, leaf] : leaves) {
    if (!leaf.node()->is_leaf) throw std::invalid_argument("grad_check: '" + name + "' is not a leaf");
    Tensor<T> x = leaf;
    x.set_requires_grad(true);
    x.zero_grad();
    xs.push_back(x);
  }

  {
    const Tensor<T> y = f();
    if (y.numel() != 1) throw ShapeError("grad_check: function is not scalar-valued");
    y.backward();
  }

  GradCheckResult result;
  Rng rng(options.seed);
  const T h = static_cast<T>(options.step);
  for (std::size_t l = 0; l < xs.size(); ++l) {
    Tensor<T>& x = xs[l];
    std::vector<T> analytic(x.numel(), T(0));
    if (x.has_grad()) std::copy(x.grad().begin(), x.grad().end(), analytic.begin());
    auto values = x.mutable_data();
    for (std::size_t i : pick_coords(x.numel(), options.max_coords, rng)) {
      const T original = values[i];
      values[i] = original + h;
      const T fp = evaluate(f);
      values[i] = original - h;
      const T fm = evaluate(f);
      values[i] = original;
      const double fd = (static_cast<double>(fp) - static_cast<double>(fm)) / (2.0 * options.step);
      const double an = static_cast<double>(analytic[i]);
      const double err = std::abs(an - fd) / (std::abs(an) + std::abs(fd) + options.eps);
      ++result.coords_checked;
      if (err > result.max_rel_error || result.coords_checked == 1) {
        result.max_rel_error = std::max(result.max_rel_error, err);
        result.worst_leaf = leaves[l].first;
        result.worst_index = i;
        result.worst_analytic = an;
        result.worst_numeric = fd;
      }
    }
  }
  return result;
}

template <typename T>
GradCheckResult grad_check(const std::function<Tensor<T>(const Tensor<T>&)>& f, Tensor<T> x,
                           const GradCheckOptions& options) {
  return grad_check_leaves<T>([&]() { return f(x); }, {{"x", x}}, options);
}

template GradCheckResult grad_check<double>(const std::function<Tensor<double>(const Tensor<double>&)>&,
                                            Tensor<double>, const GradCheckOptions&);
template GradCheckResult grad_check<float>(const std::function<Tensor<float>(const Tensor<float>&)>&,
                                           Tensor<float>, const GradCheckOptions&);
template GradCheckResult grad_check_leaves<double>(
    const std::function<Tensor<double>()>&,
    const std::vector<std::pair<std::string, Tensor<double>>>&, const GradCheckOptions&);
template GradCheckResult grad_check_leaves<float>(
    const std::function<Tensor<float>()>&,
    const std::vector<std::pair<std::string, Tensor<float>>>&, const GradCheckOptions&);

}  // namespace evp
