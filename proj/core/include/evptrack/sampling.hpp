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
#include <stdexcept>
#include <vector>

#include "evptrack/config.hpp"
#include "evptrack/model.hpp"
#include "evptrack/rng.hpp"
#include "evptrack/synth.hpp"

namespace evp {

class InsufficientDataError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// M sequences of one template crop and N search crops each.
struct TrainBatch {
  std::vector<TrainingSequence> sequences;

  std::size_t videos() const { return sequences.size(); }
  /// Number of search frames, N·M.
  std::size_t size() const;
};

/// Picks M distinct videos; per video a window start s in [1, T-N], a
/// template frame in [0, s-1], and search frames s..s+N-1. Search crops are
/// jittered in center and scale around the ground truth; each sequence is
/// flipped horizontally with probability flip_prob and brightness-scaled.
TrainBatch sample_batch(std::span<const VideoSequence> dataset, std::size_t M, std::size_t N,
                        const TrainConfig& train, const ModelConfig& model, const TrackerConfig& tracker,
                        Rng& rng);

/// Mirrors an image left-to-right.
Image flip_horizontal(const Image& img);

}  // namespace evp
