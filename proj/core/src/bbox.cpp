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

#include "evptrack/bbox.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evp {

bool is_valid(const BBox& b) {
  return std::isfinite(b.x) && std::isfinite(b.y) && std::isfinite(b.w) && std::isfinite(b.h) && b.w > 0.0 &&
         b.h > 0.0;
}

bool is_valid_normalized(const BBox& b, double tol) {
  return is_valid(b) && b.x >= -tol && b.y >= -tol && b.right() <= 1.0 + tol && b.bottom() <= 1.0 + tol;
}

namespace {

// Areas are computed from corner differences so that identical boxes produce
// bitwise-identical intersection, union and enclosing areas.
struct Corners {
  double x1, y1, x2, y2;
  explicit Corners(const BBox& b) : x1(b.x), y1(b.y), x2(b.x + b.w), y2(b.y + b.h) {}
  double area() const { return (x2 - x1) * (y2 - y1); }
};

struct Overlap {
  double inter;
  double uni;
  double enclose;
};

Overlap overlap(const BBox& a, const BBox& b) {
  const Corners p(a), q(b);
  const double iw = std::max(0.0, std::min(p.x2, q.x2) - std::max(p.x1, q.x1));
  const double ih = std::max(0.0, std::min(p.y2, q.y2) - std::max(p.y1, q.y1));
  const double inter = iw * ih;
  const double cw = std::max(p.x2, q.x2) - std::min(p.x1, q.x1);
  const double ch = std::max(p.y2, q.y2) - std::min(p.y1, q.y1);
  return {inter, p.area() + q.area() - inter, cw * ch};
}

}  // namespace

double iou(const BBox& a, const BBox& b) {
  const Overlap o = overlap(a, b);
  return o.uni > 0.0 ? o.inter / o.uni : 0.0;
}

double giou(const BBox& a, const BBox& b) {
  if (!is_valid(a) || !is_valid(b)) throw std::invalid_argument("giou: zero-area or non-finite box");
  const Overlap o = overlap(a, b);
  return o.inter / o.uni - (o.enclose - o.uni) / o.enclose;
}

}  // namespace evp
