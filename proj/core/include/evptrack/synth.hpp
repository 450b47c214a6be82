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
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "evptrack/bbox.hpp"
#include "evptrack/config.hpp"
#include "evptrack/image.hpp"
#include "evptrack/rng.hpp"

namespace evp {

enum class TargetShape { kRectangle, kEllipse };

/// Rendering recipe for one synthetic video. Boxes are kept on integer pixel
/// coordinates so the rendered target and its ground truth agree exactly.
struct VideoSpec {
  std::size_t frames = 32;
  std::size_t width = 128;
  std::size_t height = 128;

  TargetShape shape = TargetShape::kRectangle;
  std::array<float, 3> color{0.9f, 0.2f, 0.2f};
  double texture_freq = 2.0;  // checker cycles across the target
  double texture_amp = 0.3;
  double base_w = 20.0;
  double base_h = 20.0;

  double speed = 1.5;  // px/frame scale of the random walk
  double scale_amplitude = 0.0;
  double scale_period = 24.0;  // frames
  double drift_rate = 0.0;     // hue rotation, radians per frame

  std::array<float, 3> bg_low{0.3f, 0.3f, 0.3f};
  std::array<float, 3> bg_high{0.6f, 0.6f, 0.6f};
  double bg_freq = 3.0;
  double bg_noise = 0.05;
};

struct VideoSequence {
  std::string name;
  VideoSpec spec;
  std::uint64_t seed = 0;
  std::vector<Image> frames;
  std::vector<BBox> boxes;  // pixels, one per frame
};

/// Draws a spec from the dataset ranges.
VideoSpec random_spec(const DataConfig& cfg, Rng& rng);

/// Renders the video. Deterministic in (spec, seed); frames are quantized to
/// 8 bits so they survive a PPM round trip unchanged.
VideoSequence synth_video(const VideoSpec& spec, std::uint64_t seed);

/// `cfg.num_videos` videos named video_000, video_001, ...
std::vector<VideoSequence> synth_dataset(const DataConfig& cfg);

/// Rotates an RGB color about the gray axis by `angle` radians, clamped to [0, 1].
std::array<float, 3> rotate_hue(const std::array<float, 3>& rgb, double angle);

/// DIR/frame_0000.ppm, ... plus DIR/groundtruth.txt.
void write_video(const std::filesystem::path& dir, const VideoSequence& video);
VideoSequence read_video(const std::filesystem::path& dir);

/// One subdirectory per video.
void write_dataset(const std::filesystem::path& dir, const std::vector<VideoSequence>& videos);
/// Reads every subdirectory holding a groundtruth.txt, in name order.
std::vector<VideoSequence> read_dataset(const std::filesystem::path& dir);

}  // namespace evp
