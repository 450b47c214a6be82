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
#include <string>
#include <vector>

#include "evptrack/grad_check.hpp"

namespace evp {

struct GradSuiteCase {
  std::string name;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  GradCheckResult result;

  bool passed() const { return result.max_rel_error < tolerance; }
};

struct GradSuiteOptions {
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  double op_tolerance = 1e-5;
  double model_tolerance = 1e-4;
  /// Coordinates sampled per parameter tensor in the end-to-end checks.
  std::size_t model_coords = 4;
};

/// Float64 finite-difference checks of every differentiable op, each loss
/// term, and the full sequence loss of a small model over two frames with
/// both prompt generators and the state update in the graph.
std::vector<GradSuiteCase> run_grad_suite(const GradSuiteOptions& options = {});

}  // namespace evp
