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
#include <string>
#include <vector>

#include "evptrack/bbox.hpp"
#include "evptrack/config.hpp"
#include "evptrack/layers.hpp"

namespace evp {

/// Three per-token MLP branches (D -> D -> {1, 2, 2}) on the fused search tokens.
template <typename T>
struct HeadParams {
  FeedForward<T> score;
  FeedForward<T> offset;
  FeedForward<T> size;

  static HeadParams init(const ModelConfig& cfg, Rng& rng);
  void collect(ParameterList<T>& out, const std::string& prefix) const;
};

/// Sigmoid-bounded maps on the S×S search grid.
template <typename T>
struct HeadOutput {
  Tensor<T> score;   // [S, S]
  Tensor<T> offset;  // [2, S, S]: x, y sub-cell offsets
  Tensor<T> size;    // [2, S, S]: w, h normalized to the crop
  std::size_t grid = 0;
};

struct Cell {
  std::size_t row = 0;
  std::size_t col = 0;
  bool operator==(const Cell&) const = default;
};

template <typename T>
HeadOutput<T> head_forward(const Tensor<T>& search_tokens, const HeadParams<T>& params);

/// Heatmap with value 1 at the center cell and exp(-d²/2σ²) elsewhere, where d
/// is the cell distance and σ = max(1, S·max(w, h)/6).
struct GaussianTarget {
  std::vector<double> heatmap;  // row-major S×S
  std::size_t grid = 0;
  Cell peak;
  double sigma = 1.0;
};

/// Cell containing the box center: floor(center·S), clamped to the grid.
Cell center_cell(const BBox& box, std::size_t grid);

GaussianTarget make_gaussian_target(const BBox& gt, std::size_t grid);

/// Penalty-reduced focal loss normalized by the number of peak cells.
/// Predictions are clamped to [eps, 1 - eps].
template <typename T>
Tensor<T> focal_loss(const Tensor<T>& score, const GaussianTarget& target, const LossConfig& cfg);

/// Differentiable decode at one cell; returns corners [x1, y1, x2, y2]
/// clamped to [0, 1].
template <typename T>
Tensor<T> box_corners_at(const HeadOutput<T>& out, Cell cell);

/// 1 - GIoU between predicted corners [4] and a fixed target box.
template <typename T>
Tensor<T> giou_loss(const Tensor<T>& corners, const BBox& gt);

/// Mean absolute corner error against a fixed target box.
template <typename T>
Tensor<T> l1_loss(const Tensor<T>& corners, const BBox& gt);

template <typename T>
struct LossTerms {
  Tensor<T> total;
  Tensor<T> cls;
  Tensor<T> l1;
  Tensor<T> giou;
};

/// cls + lambda_l1 * L1 + lambda_giou * (1 - GIoU), regression terms taken at
/// the ground-truth center cell.
template <typename T>
LossTerms<T> total_loss(const HeadOutput<T>& out, const BBox& gt, const LossConfig& cfg);

/// Box (normalized, top-left form) predicted at `cell`, clamped to [0, 1].
template <typename T>
BBox decode_box(const HeadOutput<T>& out, Cell cell);

/// First maximum in row-major order.
template <typename T>
Cell argmax_cell(std::span<const T> map, std::size_t grid);

}  // namespace evp
