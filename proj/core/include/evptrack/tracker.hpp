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
#include <span>
#include <vector>

#include "evptrack/bbox.hpp"
#include "evptrack/config.hpp"
#include "evptrack/image.hpp"
#include "evptrack/model.hpp"

namespace evp {

/// Affine link between frame pixels and normalized crop coordinates:
/// x_crop = (x - x0) / side.
struct CropMapping {
  CropWindow window;
  double fill_fraction = 0.0;

  BBox to_crop(const BBox& image_box) const;
  BBox to_image(const BBox& crop_box) const;
};

struct RegionCrop {
  ImageCrop crop;
  CropMapping mapping;
};

/// Square crop centered on `box` with side factor·sqrt(w·h), resampled to
/// out_size².
RegionCrop crop_region(const Image& frame, const BBox& box, double factor, std::size_t out_size, CropKind kind);

inline RegionCrop crop_search_region(const Image& frame, const BBox& prev, double factor, std::size_t out_size) {
  return crop_region(frame, prev, factor, out_size, CropKind::kSearch);
}

/// Outer product of the 1-D Hann window w[n] = 0.5(1 - cos(2πn/(S-1))).
struct PenaltyWindow {
  std::size_t size = 0;
  std::vector<double> values;  // row-major S×S

  double at(std::size_t i, std::size_t j) const { return values[i * size + j]; }
};

std::vector<double> hann_1d(std::size_t n);
PenaltyWindow hann_window(std::size_t n);

/// score ⊙ ((1 - weight) + weight·window)
std::vector<double> apply_penalty(std::span<const double> score, const PenaltyWindow& window, double weight);

/// Tracking state for one video. Holds handles to the model parameters, so
/// the parameters must not be modified while a session is alive.
template <typename T>
class TrackerSession {
 public:
  TrackerSession(const ModelParams<T>& params, const TrackerConfig& cfg, const Image& first_frame,
                 const BBox& init_box, std::uint64_t video_id = 0);

  BBox track_frame(const Image& frame);

  const SpatioTemporalState<T>& state() const { return state_; }
  const TemplateContext<T>& template_context() const { return context_; }
  const BBox& box() const { return box_; }
  std::size_t frames_tracked() const { return frames_tracked_; }
  /// Penalized score map of the most recent frame.
  const std::vector<double>& last_scores() const { return last_scores_; }

 private:
  ModelParams<T> params_;
  TrackerConfig cfg_;
  TemplateContext<T> context_;
  SpatioTemporalState<T> state_;
  PenaltyWindow window_;
  BBox box_;
  std::size_t frame_width_ = 0;
  std::size_t frame_height_ = 0;
  std::size_t frames_tracked_ = 0;
  std::vector<double> last_scores_;
};

/// One-pass tracking: frame 0 yields the init box, frames 1..T-1 are tracked.
template <typename T>
std::vector<BBox> track_video(const ModelParams<T>& params, const TrackerConfig& cfg,
                              std::span<const Image> frames, const BBox& init_box);

}  // namespace evp
