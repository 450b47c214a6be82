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

// Independent reference implementations used by the tests. Everything here is
// written from the textbook definitions with plain loops and shares no code
// with the library beyond the plain data types.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "evptrack/bbox.hpp"
#include "evptrack/rng.hpp"
#include "evptrack/tensor.hpp"

namespace evp::oracle {

using Matrix = std::vector<std::vector<double>>;

template <typename T>
Matrix to_matrix(const Tensor<T>& t) {
  const std::size_t rows = t.dim(0), cols = t.numel() / rows;
  Matrix m(rows, std::vector<double>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m[i][j] = static_cast<double>(t.data()[i * cols + j]);
  return m;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  Matrix c(a.size(), std::vector<double>(b[0].size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b[0].size(); ++j)
      for (std::size_t k = 0; k < b.size(); ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline std::vector<double> softmax(const std::vector<double>& row) {
  std::vector<double> e(row.size());
  double z = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i) z += (e[i] = std::exp(row[i]));
  for (double& v : e) v /= z;
  return e;
}

/// Two-pass mean then variance, biased estimator.
inline std::vector<double> layer_norm(const std::vector<double>& x, double eps) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(x.size());
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = (x[i] - mean) / std::sqrt(var + eps);
  return y;
}

inline double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0))); }

/// GIoU straight from min/max of the corner coordinates.
inline double giou(const BBox& a, const BBox& b) {
  const double ax2 = a.x + a.w, ay2 = a.y + a.h, bx2 = b.x + b.w, by2 = b.y + b.h;
  const double iw = std::max(0.0, std::min(ax2, bx2) - std::max(a.x, b.x));
  const double ih = std::max(0.0, std::min(ay2, by2) - std::max(a.y, b.y));
  const double inter = iw * ih;
  const double uni = a.w * a.h + b.w * b.h - inter;
  const double cw = std::max(ax2, bx2) - std::min(a.x, b.x);
  const double ch = std::max(ay2, by2) - std::min(a.y, b.y);
  return inter / uni - (cw * ch - uni) / (cw * ch);
}

struct RasterResult {
  double iou = 0.0;
  double giou = 0.0;
};

/// Counts cell centers of an n×n grid laid over the enclosing box.
inline RasterResult raster_giou(const BBox& a, const BBox& b, std::size_t n) {
  const double x0 = std::min(a.x, b.x), y0 = std::min(a.y, b.y);
  const double x1 = std::max(a.x + a.w, b.x + b.w), y1 = std::max(a.y + a.h, b.y + b.h);
  const auto inside = [](const BBox& r, double x, double y) {
    return x >= r.x && x < r.x + r.w && y >= r.y && y < r.y + r.h;
  };
  std::size_t in_a_and_b = 0, in_a_or_b = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = y0 + (static_cast<double>(i) + 0.5) * (y1 - y0) / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double x = x0 + (static_cast<double>(j) + 0.5) * (x1 - x0) / static_cast<double>(n);
      const bool ia = inside(a, x, y), ib = inside(b, x, y);
      in_a_and_b += ia && ib;
      in_a_or_b += ia || ib;
    }
  }
  RasterResult r;
  const double total = static_cast<double>(n * n);
  r.iou = static_cast<double>(in_a_and_b) / static_cast<double>(in_a_or_b);
  r.giou = r.iou - (total - static_cast<double>(in_a_or_b)) / total;
  return r;
}

/// Penalty-reduced focal loss, one cell at a time.
inline double focal(const std::vector<double>& pred, const std::vector<double>& target, double alpha, double beta,
                    double eps) {
  double loss = 0.0;
  int peaks = 0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const double p = std::min(std::max(pred[k], eps), 1.0 - eps);
    if (target[k] == 1.0) {
      ++peaks;
      loss -= std::pow(1.0 - p, alpha) * std::log(p);
    } else {
      loss -= std::pow(1.0 - target[k], beta) * std::pow(p, alpha) * std::log(1.0 - p);
    }
  }
  return loss / std::max(1, peaks);
}

inline BBox random_box(Rng& rng, double extent = 1.0) {
  const double w = rng.uniform(0.02, 0.6) * extent, h = rng.uniform(0.02, 0.6) * extent;
  return {rng.uniform(0.0, extent - w), rng.uniform(0.0, extent - h), w, h};
}

template <typename T>
Tensor<T> random_tensor(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0, bool requires_grad = false) {
  std::vector<T> v(shape_numel(shape));
  for (auto& x : v) x = static_cast<T>(rng.uniform(lo, hi));
  return Tensor<T>(std::move(shape), std::move(v), requires_grad);
}

}  // namespace evp::oracle
