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

#include "evptrack/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "evptrack/errors.hpp"

namespace evp {

namespace {

float to_unit(int v) { return static_cast<float>(v) / 255.0f; }

int to_byte(float v) { return static_cast<int>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f)); }

}  // namespace

Image resize_bilinear(const Image& src, std::size_t out_h, std::size_t out_w) {
  if (src.empty() || out_h == 0 || out_w == 0) throw std::invalid_argument("resize_bilinear: empty image");
  if (out_h == src.height && out_w == src.width) return src;
  Image out(out_h, out_w);
  const double sy_scale = static_cast<double>(src.height) / static_cast<double>(out_h);
  const double sx_scale = static_cast<double>(src.width) / static_cast<double>(out_w);
  const auto max_y = static_cast<double>(src.height - 1);
  const auto max_x = static_cast<double>(src.width - 1);
  for (std::size_t v = 0; v < out_h; ++v) {
    const double py = std::clamp((static_cast<double>(v) + 0.5) * sy_scale - 0.5, 0.0, max_y);
    const auto y0 = static_cast<std::size_t>(std::floor(py));
    const std::size_t y1 = std::min(y0 + 1, src.height - 1);
    const double fy = py - static_cast<double>(y0);
    for (std::size_t u = 0; u < out_w; ++u) {
      const double px = std::clamp((static_cast<double>(u) + 0.5) * sx_scale - 0.5, 0.0, max_x);
      const auto x0 = static_cast<std::size_t>(std::floor(px));
      const std::size_t x1 = std::min(x0 + 1, src.width - 1);
      const double fx = px - static_cast<double>(x0);
      for (std::size_t c = 0; c < Image::kChannels; ++c) {
        const double top = src.at(c, y0, x0) * (1.0 - fx) + src.at(c, y0, x1) * fx;
        const double bot = src.at(c, y1, x0) * (1.0 - fx) + src.at(c, y1, x1) * fx;
        out.at(c, v, u) = static_cast<float>(top * (1.0 - fy) + bot * fy);
      }
    }
  }
  return out;
}

std::array<float, 3> channel_mean(const Image& img) {
  std::array<float, 3> m{};
  const std::size_t plane = img.height * img.width;
  if (plane == 0) return m;
  for (std::size_t c = 0; c < Image::kChannels; ++c) {
    double acc = 0.0;
    for (std::size_t i = 0; i < plane; ++i) acc += img.data[c * plane + i];
    m[c] = static_cast<float>(acc / static_cast<double>(plane));
  }
  return m;
}

CropResult crop_square(const Image& frame, double cx, double cy, double side, std::size_t out_size) {
  if (frame.empty()) throw std::invalid_argument("crop_square: empty frame");
  if (!(side > 0.0) || out_size == 0) throw std::invalid_argument("crop_square: degenerate window");
  CropResult result;
  result.window = CropWindow{cx - side / 2.0, cy - side / 2.0, side, out_size};
  result.image = Image(out_size, out_size);
  const auto mean = channel_mean(frame);
  const auto H = static_cast<long>(frame.height);
  const auto W = static_cast<long>(frame.width);
  const double step = side / static_cast<double>(out_size);

  auto pixel = [&](std::size_t c, long y, long x) -> double {
    if (y < 0 || y >= H || x < 0 || x >= W) return mean[c];
    return frame.at(c, static_cast<std::size_t>(y), static_cast<std::size_t>(x));
  };

  std::size_t outside = 0;
  for (std::size_t v = 0; v < out_size; ++v) {
    const double sy = result.window.y0 + (static_cast<double>(v) + 0.5) * step;
    const double py = sy - 0.5;
    const auto yl = static_cast<long>(std::floor(py));
    const double fy = py - static_cast<double>(yl);
    for (std::size_t u = 0; u < out_size; ++u) {
      const double sx = result.window.x0 + (static_cast<double>(u) + 0.5) * step;
      if (sx < 0.0 || sy < 0.0 || sx >= static_cast<double>(W) || sy >= static_cast<double>(H)) ++outside;
      const double px = sx - 0.5;
      const auto xl = static_cast<long>(std::floor(px));
      const double fx = px - static_cast<double>(xl);
      for (std::size_t c = 0; c < Image::kChannels; ++c) {
        const double top = pixel(c, yl, xl) * (1.0 - fx) + pixel(c, yl, xl + 1) * fx;
        const double bot = pixel(c, yl + 1, xl) * (1.0 - fx) + pixel(c, yl + 1, xl + 1) * fx;
        result.image.at(c, v, u) = static_cast<float>(top * (1.0 - fy) + bot * fy);
      }
    }
  }
  result.fill_fraction = static_cast<double>(outside) / static_cast<double>(out_size * out_size);
  return result;
}

void quantize8(Image& img) {
  for (float& v : img.data) v = to_unit(to_byte(v));
}

void write_ppm(const std::filesystem::path& path, const Image& img) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  os << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  std::string row(img.width * 3, '\0');
  for (std::size_t y = 0; y < img.height; ++y) {
    for (std::size_t x = 0; x < img.width; ++x)
      for (std::size_t c = 0; c < 3; ++c) row[x * 3 + c] = static_cast<char>(to_byte(img.at(c, y, x)));
    os.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
  if (!os) throw IoError("failed writing '" + path.string() + "'");
}

Image read_ppm(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open image '" + path.string() + "'");
  std::string magic;
  std::size_t w = 0, h = 0;
  int maxval = 0;
  is >> magic >> w >> h >> maxval;
  if (magic != "P6" || w == 0 || h == 0 || maxval != 255) {
    throw FormatError("'" + path.string() + "' is not an 8-bit binary PPM");
  }
  is.get();  // single whitespace after the header
  Image img(h, w);
  std::string row(w * 3, '\0');
  for (std::size_t y = 0; y < h; ++y) {
    if (!is.read(row.data(), static_cast<std::streamsize>(row.size()))) {
      throw FormatError("'" + path.string() + "' is truncated");
    }
    for (std::size_t x = 0; x < w; ++x)
      for (std::size_t c = 0; c < 3; ++c)
        img.at(c, y, x) = to_unit(static_cast<unsigned char>(row[x * 3 + c]));
  }
  return img;
}

}  // namespace evp
