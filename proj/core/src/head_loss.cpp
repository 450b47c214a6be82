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

#include "evptrack/head_loss.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace evp {

namespace {

std::size_t grid_side(std::size_t tokens) {
  const auto s = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(tokens))));
  if (s * s != tokens) throw ShapeError("head: " + std::to_string(tokens) + " search tokens is not a square grid");
  return s;
}

// [N, k] per-token outputs -> [k, S, S] channel-first maps.
template <typename T>
Tensor<T> to_maps(const Tensor<T>& x, std::size_t grid) {
  const std::size_t k = x.dim(1);
  if (k == 1) return reshape(x, {grid, grid});
  return reshape(transpose(x), {k, grid, grid});
}

struct Corners {
  double x1, y1, x2, y2;
};

Corners corners_of(const BBox& b) { return {b.x, b.y, b.x + b.w, b.y + b.h}; }

}  // namespace

template <typename T>
HeadParams<T> HeadParams<T>::init(const ModelConfig& cfg, Rng& rng) {
  HeadParams p;
  p.score = FeedForward<T>::init(cfg.dim, cfg.dim, 1, cfg.init_std, rng);
  p.offset = FeedForward<T>::init(cfg.dim, cfg.dim, 2, cfg.init_std, rng);
  p.size = FeedForward<T>::init(cfg.dim, cfg.dim, 2, cfg.init_std, rng);
  // Start the score map near a 0.1 prior; an all-0.5 map makes the early
  // focal loss dominated by negatives.
  p.score.fc2.bias.mutable_data()[0] = static_cast<T>(std::log(0.1 / 0.9));
  return p;
}

template <typename T>
void HeadParams<T>::collect(ParameterList<T>& out, const std::string& prefix) const {
  score.collect(out, prefix + ".score", ParamGroup::kOther);
  offset.collect(out, prefix + ".offset", ParamGroup::kOther);
  size.collect(out, prefix + ".size", ParamGroup::kOther);
}

template <typename T>
HeadOutput<T> head_forward(const Tensor<T>& search_tokens, const HeadParams<T>& params) {
  if (search_tokens.rank() != 2) throw ShapeError("head_forward: expected [N_x, D], got " + shape_str(search_tokens.shape()));
  const std::size_t s = grid_side(search_tokens.dim(0));
  HeadOutput<T> out;
  out.grid = s;
  out.score = to_maps(sigmoid(params.score(search_tokens)), s);
  out.offset = to_maps(sigmoid(params.offset(search_tokens)), s);
  out.size = to_maps(sigmoid(params.size(search_tokens)), s);
  return out;
}

Cell center_cell(const BBox& box, std::size_t grid) {
  const auto idx = [grid](double c) {
    const double f = std::floor(c * static_cast<double>(grid));
    return static_cast<std::size_t>(std::clamp(f, 0.0, static_cast<double>(grid - 1)));
  };
  return {idx(box.cy()), idx(box.cx())};
}

GaussianTarget make_gaussian_target(const BBox& gt, std::size_t grid) {
  if (grid == 0) throw std::invalid_argument("make_gaussian_target: empty grid");
  GaussianTarget t;
  t.grid = grid;
  t.peak = center_cell(gt, grid);
  t.sigma = std::max(1.0, static_cast<double>(grid) * std::max(gt.w, gt.h) / 6.0);
  t.heatmap.resize(grid * grid);
  const double denom = 2.0 * t.sigma * t.sigma;
  for (std::size_t i = 0; i < grid; ++i) {
    for (std::size_t j = 0; j < grid; ++j) {
      const double di = static_cast<double>(i) - static_cast<double>(t.peak.row);
      const double dj = static_cast<double>(j) - static_cast<double>(t.peak.col);
      t.heatmap[i * grid + j] = std::exp(-(di * di + dj * dj) / denom);
    }
  }
  t.heatmap[t.peak.row * grid + t.peak.col] = 1.0;
  return t;
}

template <typename T>
Tensor<T> focal_loss(const Tensor<T>& score, const GaussianTarget& target, const LossConfig& cfg) {
  if (score.numel() != target.heatmap.size()) {
    throw ShapeError("focal_loss: score " + shape_str(score.shape()) + " vs target grid " +
                     std::to_string(target.grid));
  }
  const double alpha = cfg.focal_alpha;
  const double beta = cfg.focal_beta;
  const double eps = cfg.clamp_eps;
  const auto p_in = score.data();
  const std::size_t n = p_in.size();

  std::size_t peaks = 0;
  for (double y : target.heatmap) peaks += (y == 1.0);
  const double norm = 1.0 / static_cast<double>(std::max<std::size_t>(1, peaks));

  double total = 0.0;
  std::vector<double> dldp(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double raw = static_cast<double>(p_in[k]);
    const double p = std::clamp(raw, eps, 1.0 - eps);
    const bool inside = raw >= eps && raw <= 1.0 - eps;
    const double y = target.heatmap[k];
    if (y == 1.0) {
      const double q = std::pow(1.0 - p, alpha);
      total += -q * std::log(p);
      if (inside) dldp[k] = alpha * std::pow(1.0 - p, alpha - 1.0) * std::log(p) - q / p;
    } else {
      const double w = std::pow(1.0 - y, beta);
      const double pa = std::pow(p, alpha);
      total += -w * pa * std::log(1.0 - p);
      if (inside) dldp[k] = -w * (alpha * std::pow(p, alpha - 1.0) * std::log(1.0 - p) - pa / (1.0 - p));
    }
  }
  return detail::make_result<T>("focal_loss", {1}, {static_cast<T>(total * norm)}, {score},
                                [dldp = std::move(dldp), norm](detail::Node<T>& out) {
                                  auto* g = detail::parent_grad(out, 0);
                                  if (!g) return;
                                  const double up = static_cast<double>(out.grad[0]) * norm;
                                  for (std::size_t k = 0; k < dldp.size(); ++k)
                                    (*g)[k] += static_cast<T>(up * dldp[k]);
                                });
}

template <typename T>
Tensor<T> box_corners_at(const HeadOutput<T>& out, Cell cell) {
  const std::size_t s = out.grid;
  if (cell.row >= s || cell.col >= s) throw std::out_of_range("box_corners_at: cell outside grid");
  if (out.offset.shape() != Shape{2, s, s} || out.size.shape() != Shape{2, s, s}) {
    throw ShapeError("box_corners_at: offset/size maps must be [2, S, S]");
  }
  const std::size_t k = cell.row * s + cell.col;
  const std::size_t ix = k, iy = s * s + k;
  const double inv = 1.0 / static_cast<double>(s);
  const double cx = (static_cast<double>(cell.col) + out.offset.data()[ix]) * inv;
  const double cy = (static_cast<double>(cell.row) + out.offset.data()[iy]) * inv;
  const double w = out.size.data()[ix];
  const double h = out.size.data()[iy];
  const double raw[4] = {cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h};
  std::vector<T> v(4);
  std::array<bool, 4> pass{};
  for (int c = 0; c < 4; ++c) {
    v[c] = static_cast<T>(std::clamp(raw[c], 0.0, 1.0));
    pass[c] = raw[c] >= 0.0 && raw[c] <= 1.0;
  }
  return detail::make_result<T>(
      "box_corners_at", {4}, std::move(v), {out.offset, out.size},
      [ix, iy, inv, pass](detail::Node<T>& node) {
        const auto& g = node.grad;
        const T gx1 = pass[0] ? g[0] : T(0), gy1 = pass[1] ? g[1] : T(0);
        const T gx2 = pass[2] ? g[2] : T(0), gy2 = pass[3] ? g[3] : T(0);
        if (auto* go = detail::parent_grad(node, 0)) {
          (*go)[ix] += static_cast<T>(inv) * (gx1 + gx2);
          (*go)[iy] += static_cast<T>(inv) * (gy1 + gy2);
        }
        if (auto* gs = detail::parent_grad(node, 1)) {
          (*gs)[ix] += T(0.5) * (gx2 - gx1);
          (*gs)[iy] += T(0.5) * (gy2 - gy1);
        }
      });
}

template <typename T>
Tensor<T> giou_loss(const Tensor<T>& corners, const BBox& gt) {
  if (corners.numel() != 4) throw ShapeError("giou_loss: expected 4 corners, got " + shape_str(corners.shape()));
  if (!is_valid(gt)) throw std::invalid_argument("giou_loss: invalid target box");
  const auto c = corners.data();
  const double px1 = c[0], py1 = c[1], px2 = c[2], py2 = c[3];
  const Corners g = corners_of(gt);

  const double iw_raw = std::min(px2, g.x2) - std::max(px1, g.x1);
  const double ih_raw = std::min(py2, g.y2) - std::max(py1, g.y1);
  const double iw = std::max(0.0, iw_raw), ih = std::max(0.0, ih_raw);
  const double inter = iw * ih;
  const double pw = px2 - px1, ph = py2 - py1;
  const double ap = pw * ph;
  const double ag = (g.x2 - g.x1) * (g.y2 - g.y1);
  const double uni = ap + ag - inter;
  const double cw = std::max(px2, g.x2) - std::min(px1, g.x1);
  const double ch = std::max(py2, g.y2) - std::min(py1, g.y1);
  const double enc = cw * ch;
  if (!(uni > 0.0) || !(enc > 0.0)) throw NumericError("giou_loss: degenerate union or enclosure");
  const double giou = inter / uni - (enc - uni) / enc;

  // d giou = dI/U - I/U² dU + dU/C - U/C² dC, with dU = dA_p - dI.
  std::array<double, 4> d_inter{}, d_area{}, d_enc{};
  if (iw_raw > 0.0 && ih_raw > 0.0) {
    d_inter[0] = px1 > g.x1 ? -ih : 0.0;
    d_inter[2] = px2 < g.x2 ? ih : 0.0;
    d_inter[1] = py1 > g.y1 ? -iw : 0.0;
    d_inter[3] = py2 < g.y2 ? iw : 0.0;
  }
  d_area = {-ph, -pw, ph, pw};
  d_enc[0] = px1 < g.x1 ? -ch : 0.0;
  d_enc[2] = px2 > g.x2 ? ch : 0.0;
  d_enc[1] = py1 < g.y1 ? -cw : 0.0;
  d_enc[3] = py2 > g.y2 ? cw : 0.0;
  std::array<double, 4> dloss{};
  for (int k = 0; k < 4; ++k) {
    const double du = d_area[k] - d_inter[k];
    const double dg = d_inter[k] / uni - inter / (uni * uni) * du + du / enc - uni / (enc * enc) * d_enc[k];
    dloss[k] = -dg;
  }
  return detail::make_result<T>("giou_loss", {1}, {static_cast<T>(1.0 - giou)}, {corners},
                                [dloss](detail::Node<T>& out) {
                                  auto* gr = detail::parent_grad(out, 0);
                                  if (!gr) return;
                                  for (int k = 0; k < 4; ++k) (*gr)[k] += out.grad[0] * static_cast<T>(dloss[k]);
                                });
}

template <typename T>
Tensor<T> l1_loss(const Tensor<T>& corners, const BBox& gt) {
  if (corners.numel() != 4) throw ShapeError("l1_loss: expected 4 corners, got " + shape_str(corners.shape()));
  const Corners g = corners_of(gt);
  const Tensor<T> target({4}, {static_cast<T>(g.x1), static_cast<T>(g.y1), static_cast<T>(g.x2), static_cast<T>(g.y2)});
  return mean(abs(sub(reshape(corners, {4}), target)));
}

template <typename T>
LossTerms<T> total_loss(const HeadOutput<T>& out, const BBox& gt, const LossConfig& cfg) {
  LossTerms<T> t;
  t.cls = focal_loss(out.score, make_gaussian_target(gt, out.grid), cfg);
  const Tensor<T> box = box_corners_at(out, center_cell(gt, out.grid));
  t.l1 = l1_loss(box, gt);
  t.giou = giou_loss(box, gt);
  t.total = add_n<T>({t.cls, scale(t.l1, static_cast<T>(cfg.lambda_l1)), scale(t.giou, static_cast<T>(cfg.lambda_giou))});
  return t;
}

template <typename T>
BBox decode_box(const HeadOutput<T>& out, Cell cell) {
  NoGradGuard guard;
  const Tensor<T> corners = box_corners_at(out, cell);
  const auto c = corners.data();
  return BBox::from_corners(c[0], c[1], c[2], c[3]);
}

template <typename T>
Cell argmax_cell(std::span<const T> map, std::size_t grid) {
  if (grid == 0 || map.size() != grid * grid) throw ShapeError("argmax_cell: map is not S×S");
  std::size_t best = 0;
  for (std::size_t k = 1; k < map.size(); ++k)
    if (map[k] > map[best]) best = k;
  return {best / grid, best % grid};
}

#define EVP_INSTANTIATE_HEAD(T)                                                                  \
  template struct HeadParams<T>;                                                                \
  template HeadOutput<T> head_forward<T>(const Tensor<T>&, const HeadParams<T>&);               \
  template Tensor<T> focal_loss<T>(const Tensor<T>&, const GaussianTarget&, const LossConfig&); \
  template Tensor<T> box_corners_at<T>(const HeadOutput<T>&, Cell);                             \
  template Tensor<T> giou_loss<T>(const Tensor<T>&, const BBox&);                               \
  template Tensor<T> l1_loss<T>(const Tensor<T>&, const BBox&);                                 \
  template LossTerms<T> total_loss<T>(const HeadOutput<T>&, const BBox&, const LossConfig&);    \
  template BBox decode_box<T>(const HeadOutput<T>&, Cell);                                      \
  template Cell argmax_cell<T>(std::span<const T>, std::size_t);

EVP_INSTANTIATE_HEAD(float)
EVP_INSTANTIATE_HEAD(double)

}  // namespace evp
