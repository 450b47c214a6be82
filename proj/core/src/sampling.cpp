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

#include "evptrack/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "evptrack/tracker.hpp"

namespace evp {

std::size_t TrainBatch::size() const {
  std::size_t n = 0;
  for (const auto& s : sequences) n += s.search.size();
  return n;
}

Image flip_horizontal(const Image& img) {
  Image out(img.height, img.width);
  for (std::size_t c = 0; c < Image::kChannels; ++c)
    for (std::size_t y = 0; y < img.height; ++y)
      for (std::size_t x = 0; x < img.width; ++x) out.at(c, y, img.width - 1 - x) = img.at(c, y, x);
  return out;
}

namespace {

void scale_brightness(Image& img, double factor) {
  for (float& v : img.data) v = static_cast<float>(std::clamp(v * factor, 0.0, 1.0));
}

}  // namespace

TrainBatch sample_batch(std::span<const VideoSequence> dataset, std::size_t M, std::size_t N,
                        const TrainConfig& train, const ModelConfig& model, const TrackerConfig& tracker,
                        Rng& rng) {
  if (M == 0 || N == 0) throw std::invalid_argument("sample_batch: M and N must be positive");
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < dataset.size(); ++i)
    if (dataset[i].frames.size() >= N + 1) eligible.push_back(i);
  if (eligible.size() < M) {
    throw InsufficientDataError("sample_batch: need " + std::to_string(M) + " videos with at least " +
                                std::to_string(N + 1) + " frames, have " + std::to_string(eligible.size()));
  }
  // Partial Fisher-Yates for M distinct videos.
  for (std::size_t k = 0; k < M; ++k) std::swap(eligible[k], eligible[k + rng.index(eligible.size() - k)]);

  TrainBatch batch;
  for (std::size_t k = 0; k < M; ++k) {
    const VideoSequence& video = dataset[eligible[k]];
    const std::size_t T = video.frames.size();
    const std::size_t start = 1 + rng.index(T - N);
    const std::size_t tmpl = rng.index(start);
    const bool flip = rng.uniform() < train.flip_prob;
    const double brightness = 1.0 + rng.uniform(-train.brightness_jitter, train.brightness_jitter);

    TrainingSequence seq;
    seq.video_id = eligible[k];
    RegionCrop t = crop_region(video.frames[tmpl], video.boxes[tmpl], tracker.template_factor, model.template_size,
                               CropKind::kTemplate);
    seq.template_crop = std::move(t.crop);

    for (std::size_t f = start; f < start + N; ++f) {
      const BBox& gt = video.boxes[f];
      const double extent = std::sqrt(gt.w * gt.h);
      const double dx = rng.uniform(-train.center_jitter, train.center_jitter) * extent;
      const double dy = rng.uniform(-train.center_jitter, train.center_jitter) * extent;
      const double s = std::exp(rng.uniform(-train.scale_jitter, train.scale_jitter));
      const BBox anchor = BBox::from_center(gt.cx() + dx, gt.cy() + dy, gt.w * s, gt.h * s);
      RegionCrop r = crop_search_region(video.frames[f], anchor, tracker.search_factor, model.search_size);
      BBox target = r.mapping.to_crop(gt);
      seq.search.push_back(std::move(r.crop));
      seq.targets.push_back(target);
      seq.frame_indices.push_back(f);
    }

    if (flip) {
      seq.template_crop.pixels = flip_horizontal(seq.template_crop.pixels);
      for (auto& c : seq.search) c.pixels = flip_horizontal(c.pixels);
      for (auto& b : seq.targets) b.x = 1.0 - b.x - b.w;
    }
    scale_brightness(seq.template_crop.pixels, brightness);
    for (auto& c : seq.search) scale_brightness(c.pixels, brightness);
    batch.sequences.push_back(std::move(seq));
  }
  return batch;
}

}  // namespace evp
