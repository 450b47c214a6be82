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

#include <array>

namespace evp {

/// Axis-aligned box, top-left corner plus size. Units depend on context:
/// normalized to a crop inside the head, pixels in the tracker and metrics.
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double cx() const { return x + w / 2.0; }
  double cy() const { return y + h / 2.0; }
  double right() const { return x + w; }
  double bottom() const { return y + h; }
  double area() const { return w * h; }

  static BBox from_center(double cx, double cy, double w, double h) { return {cx - w / 2.0, cy - h / 2.0, w, h}; }
  static BBox from_corners(double x1, double y1, double x2, double y2) { return {x1, y1, x2 - x1, y2 - y1}; }

  bool operator==(const BBox&) const = default;
};

/// True when the box has positive, finite size.
bool is_valid(const BBox& b);

/// True for a valid box inside [0, 1]² up to `tol`.
bool is_valid_normalized(const BBox& b, double tol = 1e-9);

/// Intersection over union; 0 for disjoint boxes.
double iou(const BBox& a, const BBox& b);

/// IoU minus the fraction of the enclosing box not covered by the union.
/// Throws std::invalid_argument on zero-area input.
double giou(const BBox& a, const BBox& b);

}  // namespace evp
