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
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "evptrack/tensor.hpp"

namespace evp {

struct GradCheckOptions {
  double step = 1e-4;
  /// Added to the denominator of the relative error.
  double eps = 1e-6;
  /// Coordinates checked per leaf; 0 means all of them.
  std::size_t max_coords = 0;
  std::uint64_t seed = 0;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_leaf;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t coords_checked = 0;
};

/// Compares backward() against central differences of a scalar function.
///
/// Per coordinate the error is |analytic - fd| / (|analytic| + |fd| + eps);
/// the maximum over checked coordinates is reported. `x` must be a leaf; it is
/// perturbed in place and restored.
template <typename T>
GradCheckResult grad_check(const std::function<Tensor<T>(const Tensor<T>&)>& f, Tensor<T> x,
                           const GradCheckOptions& options = {});

/// Same check over several leaves that `f` reads implicitly (e.g. parameters).
template <typename T>
GradCheckResult grad_check_leaves(const std::function<Tensor<T>()>& f,
                                  const std::vector<std::pair<std::string, Tensor<T>>>& leaves,
                                  const GradCheckOptions& options = {});

extern template GradCheckResult grad_check<double>(
    const std::function<Tensor<double>(const Tensor<double>&)>&, Tensor<double>,
    const GradCheckOptions&);
extern template GradCheckResult grad_check<float>(
    const std::function<Tensor<float>(const Tensor<float>&)>&, Tensor<float>,
    const GradCheckOptions&);

}  // namespace evp
