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

#include "evptrack/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace evp {

BBox CropMapping::to_crop(const BBox& b) const {
  const double s = window.side;
  return {(b.x - window.x0) / s, (b.y - window.y0) / s, b.w / s, b.h / s};
}

BBox CropMapping::to_image(const BBox& b) const {
  const double s = window.side;
  return {window.x0 + b.x * s, window.y0 + b.y * s, b.w * s, b.h * s};
}

RegionCrop crop_region(const Image& frame, const BBox& box, double factor, std::size_t out_size, CropKind kind) {
  if (frame.empty()) throw std::invalid_argument("crop_region: empty frame");
  if (!is_valid(box)) throw std::invalid_argument("crop_region: invalid box");
  if (!(factor > 0.0)) throw std::invalid_argument("crop_region: factor must be positive");
  const double side = factor * std::sqrt(box.w * box.h);
  CropResult r = crop_square(frame, box.cx(), box.cy(), side, out_size);
  return {ImageCrop{std::move(r.image), kind}, CropMapping{r.window, r.fill_fraction}};
}

std::vector<double> hann_1d(std::size_t n) {
  if (n == 0) throw std::invalid_argument("hann_window: size must be >= 1");
  if (n == 1) return {1.0};
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k)
    w[k] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n - 1)));
  return w;
}

PenaltyWindow hann_window(std::size_t n) {
  const auto w = hann_1d(n);
  PenaltyWindow p{n, std::vector<double>(n * n)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) p.values[i * n + j] = w[i] * w[j];
  return p;
}

std::vector<double> apply_penalty(std::span<const double> score, const PenaltyWindow& window, double weight) {
  if (score.size() != window.values.size()) {
    throw ShapeError("apply_penalty: score has " + std::to_string(score.size()) + " cells, window " +
                     std::to_string(window.values.size()));
  }
  std::vector<double> out(score.size());
  for (std::size_t k = 0; k < score.size(); ++k) out[k] = score[k] * ((1.0 - weight) + weight * window.values[k]);
  return out;
}

namespace {

// Keeps the box inside the frame with at least one pixel of extent.
BBox clip_to_frame(const BBox& b, std::size_t width, std::size_t height) {
  const double W = static_cast<double>(width), H = static_cast<double>(height);
  double x1 = std::clamp(b.x, 0.0, W - 1.0);
  double y1 = std::clamp(b.y, 0.0, H - 1.0);
  double x2 = std::clamp(b.right(), x1 + 1.0, W);
  double y2 = std::clamp(b.bottom(), y1 + 1.0, H);
  return BBox::from_corners(x1, y1, x2, y2);
}

}  // namespace

template <typename T>
TrackerSession<T>::TrackerSession(const ModelParams<T>& params, const TrackerConfig& cfg, const Image& first_frame,
                                  const BBox& init_box, std::uint64_t video_id)
    : params_(params), cfg_(cfg), window_(hann_window(params.config.search_grid())), box_(init_box),
      frame_width_(first_frame.width), frame_height_(first_frame.height) {
  NoGradGuard guard;
  const RegionCrop tmpl =
      crop_region(first_frame, init_box, cfg_.template_factor, params_.config.template_size, CropKind::kTemplate);
  context_ = prepare_template(params_, tmpl.crop);
  state_ = init_state(context_.tokens, video_id);
}

template <typename T>
BBox TrackerSession<T>::track_frame(const Image& frame) {
  if (frame.width != frame_width_ || frame.height != frame_height_) {
    throw std::invalid_argument("track_frame: frame size differs from the first frame");
  }
  NoGradGuard guard;
  const RegionCrop region = crop_search_region(frame, box_, cfg_.search_factor, params_.config.search_size);
  FrameOutput<T> out = forward_frame(params_, context_, state_, region.crop);

  const auto raw = out.head.score.data();
  const std::vector<double> score(raw.begin(), raw.end());
  last_scores_ = apply_penalty(score, window_, cfg_.hann_weight);
  const Cell cell = argmax_cell<double>(last_scores_, out.head.grid);
  const BBox crop_box = decode_box(out.head, cell);

  box_ = clip_to_frame(region.mapping.to_image(crop_box), frame_width_, frame_height_);
  state_ = std::move(out.next_state);
  ++frames_tracked_;
  return box_;
}

template <typename T>
std::vector<BBox> track_video(const ModelParams<T>& params, const TrackerConfig& cfg,
                              std::span<const Image> frames, const BBox& init_box) {
  if (frames.empty()) throw std::invalid_argument("track_video: no frames");
  std::vector<BBox> boxes{init_box};
  TrackerSession<T> session(params, cfg, frames[0], init_box);
  for (std::size_t t = 1; t < frames.size(); ++t) boxes.push_back(session.track_frame(frames[t]));
  return boxes;
}

template class TrackerSession<float>;
template class TrackerSession<double>;
template std::vector<BBox> track_video<float>(const ModelParams<float>&, const TrackerConfig&,
                                              std::span<const Image>, const BBox&);
template std::vector<BBox> track_video<double>(const ModelParams<double>&, const TrackerConfig&,
                                               std::span<const Image>, const BBox&);

}  // namespace evp
