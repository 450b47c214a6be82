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

#include <array>
#include <cstdio>
#include <filesystem>

#include <gtest/gtest.h>

#include "evptrack/errors.hpp"
#include "evptrack/rng.hpp"

namespace evp {
namespace {

Image gradient_image(std::size_t h, std::size_t w) {
  Image img(h, w);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = 0; x < w; ++x) img.at(c, y, x) = static_cast<float>((x + 2 * y + c) % 256) / 255.0f;
  return img;
}

TEST(Image, ResizeToSameSizeIsIdentity) {
  const Image a = gradient_image(8, 6);
  const Image b = resize_bilinear(a, 8, 6);
  EXPECT_EQ(a.data, b.data);
}

TEST(Image, ResizeConstantStaysConstant) {
  const Image a(5, 7, 0.4f);
  const Image b = resize_bilinear(a, 11, 3);
  for (float v : b.data) EXPECT_FLOAT_EQ(v, 0.4f);
}

TEST(Image, DownsampleByTwoAveragesPairsOfALinearRamp) {
  Image a(1, 4);
  for (std::size_t x = 0; x < 4; ++x)
    for (std::size_t c = 0; c < 3; ++c) a.at(c, 0, x) = static_cast<float>(x);
  const Image b = resize_bilinear(a, 1, 2);
  EXPECT_FLOAT_EQ(b.at(0, 0, 0), 0.5f);
  EXPECT_FLOAT_EQ(b.at(0, 0, 1), 2.5f);
}

TEST(Image, CropCenteredInsideFrameHasNoFill) {
  const Image f = gradient_image(64, 64);
  const CropResult r = crop_square(f, 32.0, 32.0, 32.0, 32);
  EXPECT_DOUBLE_EQ(r.fill_fraction, 0.0);
  EXPECT_DOUBLE_EQ(r.window.x0, 16.0);
  EXPECT_DOUBLE_EQ(r.window.scale(), 1.0);
  // 1:1 sampling copies pixels exactly.
  EXPECT_FLOAT_EQ(r.image.at(1, 3, 5), f.at(1, 19, 21));
}

TEST(Image, CropOutsideFrameUsesChannelMean) {
  const Image f(10, 10, 0.7f);
  const CropResult r = crop_square(f, -50.0, -50.0, 20.0, 8);
  EXPECT_DOUBLE_EQ(r.fill_fraction, 1.0);
  for (float v : r.image.data) EXPECT_FLOAT_EQ(v, 0.7f);
}

TEST(Image, FillFractionMatchesEnumeratedSamplePoints) {
  const Image f(30, 40, 0.5f);
  for (const auto& [cx, cy, side] : {std::array<double, 3>{0.0, 0.0, 20.0}, {39.0, 5.0, 33.3}, {20.0, 29.5, 12.0}}) {
    const std::size_t out = 17;
    const CropResult r = crop_square(f, cx, cy, side, out);
    const double step = side / out;
    std::size_t outside = 0;
    for (std::size_t v = 0; v < out; ++v)
      for (std::size_t u = 0; u < out; ++u) {
        const double sx = cx - side / 2 + (u + 0.5) * step;
        const double sy = cy - side / 2 + (v + 0.5) * step;
        if (sx < 0 || sy < 0 || sx >= 40 || sy >= 30) ++outside;
      }
    EXPECT_DOUBLE_EQ(r.fill_fraction, static_cast<double>(outside) / (out * out)) << cx << "," << cy;
  }
}

TEST(Image, CropRejectsDegenerateInput) {
  EXPECT_THROW(crop_square(Image{}, 0, 0, 4, 4), std::invalid_argument);
  EXPECT_THROW(crop_square(Image(4, 4), 0, 0, 0.0, 4), std::invalid_argument);
}

TEST(Image, PpmRoundTripOfQuantizedImage) {
  Rng rng(1);
  Image img(9, 13);
  for (auto& v : img.data) v = static_cast<float>(rng.uniform());
  quantize8(img);
  const auto path = std::filesystem::temp_directory_path() / "evp_image_test.ppm";
  write_ppm(path, img);
  const Image back = read_ppm(path);
  std::filesystem::remove(path);
  EXPECT_EQ(back.height, 9u);
  EXPECT_EQ(back.width, 13u);
  EXPECT_EQ(back.data, img.data);
}

TEST(Image, ReadPpmRejectsGarbage) {
  const auto path = std::filesystem::temp_directory_path() / "evp_image_bad.ppm";
  {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    std::fputs("P3\n1 1\n255\n0 0 0\n", f);
    std::fclose(f);
  }
  EXPECT_THROW(read_ppm(path), FormatError);
  std::filesystem::remove(path);
  EXPECT_THROW(read_ppm(path), IoError);
}

}  // namespace
}  // namespace evp
