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

#include "evptrack/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "evptrack/errors.hpp"
#include "evptrack/results_io.hpp"

namespace evp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::array<float, 3> hsv_to_rgb(double h, double s, double v) {
  const double c = v * s;
  const double hp = std::fmod(h, 1.0) * 6.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  if (hp < 1) r = c, g = x;
  else if (hp < 2) r = x, g = c;
  else if (hp < 3) g = c, b = x;
  else if (hp < 4) g = x, b = c;
  else if (hp < 5) r = x, b = c;
  else r = c, b = x;
  const double m = v - c;
  return {static_cast<float>(r + m), static_cast<float>(g + m), static_cast<float>(b + m)};
}

Image render_background(const VideoSpec& spec, Rng& rng) {
  Image bg(spec.height, spec.width);
  const double phx = rng.uniform(0.0, kTwoPi);
  const double phy = rng.uniform(0.0, kTwoPi);
  for (std::size_t y = 0; y < spec.height; ++y) {
    for (std::size_t x = 0; x < spec.width; ++x) {
      const double t = 0.5 + 0.5 * std::sin(kTwoPi * spec.bg_freq * x / spec.width + phx) *
                                 std::sin(kTwoPi * spec.bg_freq * y / spec.height + phy);
      const double noise = spec.bg_noise * rng.normal();
      for (std::size_t c = 0; c < Image::kChannels; ++c) {
        const double v = spec.bg_low[c] + t * (spec.bg_high[c] - spec.bg_low[c]) + noise;
        bg.at(c, y, x) = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
  }
  return bg;
}

void draw_target(Image& img, const VideoSpec& spec, const BBox& box, const std::array<float, 3>& color) {
  const auto x0 = static_cast<std::size_t>(box.x);
  const auto y0 = static_cast<std::size_t>(box.y);
  const auto w = static_cast<std::size_t>(box.w);
  const auto h = static_cast<std::size_t>(box.h);
  for (std::size_t dy = 0; dy < h; ++dy) {
    const double v = (static_cast<double>(dy) + 0.5) / static_cast<double>(h);
    for (std::size_t dx = 0; dx < w; ++dx) {
      const double u = (static_cast<double>(dx) + 0.5) / static_cast<double>(w);
      if (spec.shape == TargetShape::kEllipse) {
        const double eu = 2.0 * u - 1.0, ev = 2.0 * v - 1.0;
        if (eu * eu + ev * ev > 1.0) continue;
      }
      const double tex = 1.0 + spec.texture_amp * std::sin(kTwoPi * spec.texture_freq * u) *
                                   std::sin(kTwoPi * spec.texture_freq * v);
      for (std::size_t c = 0; c < Image::kChannels; ++c) {
        img.at(c, y0 + dy, x0 + dx) = static_cast<float>(std::clamp(color[c] * tex, 0.0, 1.0));
      }
    }
  }
}

// Reflects a coordinate into [lo, hi], flipping the velocity on contact.
void reflect(double& pos, double& vel, double lo, double hi) {
  if (hi <= lo) {
    pos = 0.5 * (lo + hi);
    vel = 0.0;
    return;
  }
  for (int guard = 0; guard < 4 && (pos < lo || pos > hi); ++guard) {
    if (pos < lo) pos = 2.0 * lo - pos;
    if (pos > hi) pos = 2.0 * hi - pos;
    vel = -vel;
  }
  pos = std::clamp(pos, lo, hi);
}

}  // namespace

std::array<float, 3> rotate_hue(const std::array<float, 3>& rgb, double angle) {
  const double k = 1.0 / std::sqrt(3.0);
  const double c = std::cos(angle), s = std::sin(angle);
  const double v[3] = {rgb[0], rgb[1], rgb[2]};
  const double dot = k * (v[0] + v[1] + v[2]);
  // k × v with k = (1, 1, 1)/sqrt(3)
  const double cross[3] = {k * (v[2] - v[1]), k * (v[0] - v[2]), k * (v[1] - v[0])};
  std::array<float, 3> out{};
  for (int i = 0; i < 3; ++i) {
    out[i] = static_cast<float>(std::clamp(v[i] * c + cross[i] * s + k * dot * (1.0 - c), 0.0, 1.0));
  }
  return out;
}

VideoSpec random_spec(const DataConfig& cfg, Rng& rng) {
  VideoSpec spec;
  spec.frames = cfg.frames;
  spec.width = cfg.frame_size;
  spec.height = cfg.frame_size;
  spec.shape = rng.uniform() < 0.5 ? TargetShape::kRectangle : TargetShape::kEllipse;
  spec.color = hsv_to_rgb(rng.uniform(), rng.uniform(0.7, 0.95), rng.uniform(0.8, 1.0));
  spec.texture_freq = rng.uniform(1.0, 3.0);
  spec.texture_amp = rng.uniform(0.2, 0.4);
  spec.base_w = rng.uniform(cfg.min_target, cfg.max_target);
  spec.base_h = rng.uniform(cfg.min_target, cfg.max_target);
  spec.speed = cfg.speed;
  spec.scale_amplitude = cfg.scale_amplitude;
  spec.scale_period = rng.uniform(16.0, 40.0);
  spec.drift_rate = cfg.drift_rate;
  for (std::size_t c = 0; c < 3; ++c) {
    spec.bg_low[c] = static_cast<float>(rng.uniform(0.1, 0.3));
    spec.bg_high[c] = static_cast<float>(rng.uniform(0.4, 0.6));
  }
  spec.bg_freq = rng.uniform(1.5, 4.0);
  return spec;
}

VideoSequence synth_video(const VideoSpec& spec, std::uint64_t seed) {
  if (spec.frames < 2) throw std::invalid_argument("synth_video: need at least 2 frames");
  const double max_w = std::round(spec.base_w * (1.0 + spec.scale_amplitude));
  const double max_h = std::round(spec.base_h * (1.0 + spec.scale_amplitude));
  const double W = static_cast<double>(spec.width), H = static_cast<double>(spec.height);
  if (spec.base_w < 2.0 || spec.base_h < 2.0 || max_w + 2.0 > W || max_h + 2.0 > H) {
    throw std::invalid_argument("synth_video: target does not fit in the frame");
  }

  Rng rng(seed);
  VideoSequence video;
  video.spec = spec;
  video.seed = seed;
  const Image background = render_background(spec, rng);

  const double mx = 0.5 * max_w + 1.0, my = 0.5 * max_h + 1.0;
  double cx = rng.uniform(mx, W - mx), cy = rng.uniform(my, H - my);
  double vx = 0.0, vy = 0.0;
  const double phase = rng.uniform(0.0, kTwoPi);

  for (std::size_t t = 0; t < spec.frames; ++t) {
    if (t > 0) {
      vx = 0.8 * vx + 0.6 * spec.speed * rng.normal();
      vy = 0.8 * vy + 0.6 * spec.speed * rng.normal();
      cx += vx;
      cy += vy;
      reflect(cx, vx, mx, W - mx);
      reflect(cy, vy, my, H - my);
    }
    const double s = 1.0 + spec.scale_amplitude * std::sin(kTwoPi * static_cast<double>(t) / spec.scale_period + phase);
    const double w = std::max(2.0, std::round(spec.base_w * s));
    const double h = std::max(2.0, std::round(spec.base_h * s));
    const double x = std::clamp(std::round(cx - 0.5 * w), 0.0, W - w);
    const double y = std::clamp(std::round(cy - 0.5 * h), 0.0, H - h);
    const BBox box{x, y, w, h};

    Image frame = background;
    draw_target(frame, spec, box, rotate_hue(spec.color, spec.drift_rate * static_cast<double>(t)));
    quantize8(frame);
    video.frames.push_back(std::move(frame));
    video.boxes.push_back(box);
  }
  return video;
}

std::vector<VideoSequence> synth_dataset(const DataConfig& cfg) {
  const Rng root(cfg.seed);
  std::vector<VideoSequence> videos;
  for (std::size_t i = 0; i < cfg.num_videos; ++i) {
    Rng rng = root.fork(i);
    const VideoSpec spec = random_spec(cfg, rng);
    VideoSequence v = synth_video(spec, rng.next_u64());
    char name[32];
    std::snprintf(name, sizeof name, "video_%03zu", i);
    v.name = name;
    videos.push_back(std::move(v));
  }
  return videos;
}

void write_video(const std::filesystem::path& dir, const VideoSequence& video) {
  std::filesystem::create_directories(dir);
  for (std::size_t t = 0; t < video.frames.size(); ++t) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%04zu.ppm", t);
    write_ppm(dir / name, video.frames[t]);
  }
  write_boxes(dir / "groundtruth.txt", video.boxes);
}

VideoSequence read_video(const std::filesystem::path& dir) {
  VideoSequence video;
  video.name = dir.filename().string();
  video.boxes = read_boxes(dir / "groundtruth.txt");
  std::vector<std::filesystem::path> frames;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".ppm") frames.push_back(entry.path());
  }
  std::sort(frames.begin(), frames.end());
  if (frames.empty()) throw IoError("no frames in " + dir.string());
  if (frames.size() != video.boxes.size()) {
    throw FormatError(dir.string() + ": " + std::to_string(frames.size()) + " frames but " +
                      std::to_string(video.boxes.size()) + " ground-truth boxes");
  }
  for (const auto& f : frames) video.frames.push_back(read_ppm(f));
  video.spec.frames = video.frames.size();
  video.spec.width = video.frames[0].width;
  video.spec.height = video.frames[0].height;
  return video;
}

void write_dataset(const std::filesystem::path& dir, const std::vector<VideoSequence>& videos) {
  for (const auto& v : videos) write_video(dir / v.name, v);
}

std::vector<VideoSequence> read_dataset(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> dirs;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_directory() && std::filesystem::exists(entry.path() / "groundtruth.txt")) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  std::vector<VideoSequence> videos;
  for (const auto& d : dirs) videos.push_back(read_video(d));
  return videos;
}

}  // namespace evp
