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
#include <filesystem>
#include <vector>

namespace evp {

/// Three-channel float image, channel-major ([3][H][W]), values in [0, 1].
struct Image {
  static constexpr std::size_t kChannels = 3;

  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<float> data;

  Image() = default;
  Image(std::size_t h, std::size_t w, float fill = 0.0f)
      : height(h), width(w), data(kChannels * h * w, fill) {}

  bool empty() const { return data.empty(); }
  float& at(std::size_t c, std::size_t y, std::size_t x) { return data[(c * height + y) * width + x]; }
  float at(std::size_t c, std::size_t y, std::size_t x) const {
    return data[(c * height + y) * width + x];
  }
};

/// Bilinear resampling with half-pixel centers and edge clamping.
Image resize_bilinear(const Image& src, std::size_t out_h, std::size_t out_w);

std::array<float, 3> channel_mean(const Image& img);

/// Square window in frame pixel coordinates, resampled to out_size².
struct CropWindow {
  double x0 = 0.0;
  double y0 = 0.0;
  double side = 1.0;
  std::size_t out_size = 1;

  /// Output pixels per frame pixel.
  double scale() const { return static_cast<double>(out_size) / side; }
};

struct CropResult {
  Image image;
  CropWindow window;
  /// Fraction of output pixels whose sample point falls outside the frame.
  double fill_fraction = 0.0;
};

/// Cuts a square of `side` pixels centered on (cx, cy) and resamples it
/// bilinearly to out_size². Samples outside the frame take the frame's
/// per-channel mean.
CropResult crop_square(const Image& frame, double cx, double cy, double side, std::size_t out_size);

/// Rounds every value to the nearest multiple of 1/255.
void quantize8(Image& img);

/// Binary PPM (P6, maxval 255).
void write_ppm(const std::filesystem::path& path, const Image& img);
Image read_ppm(const std::filesystem::path& path);

}  // namespace evp
