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

#include "evptrack/embeddings.hpp"

#include <gtest/gtest.h>

#include "evptrack/errors.hpp"
#include "evptrack/rng.hpp"

namespace evp {
namespace {

Image random_image(std::size_t h, std::size_t w, Rng& rng) {
  Image img(h, w);
  for (auto& v : img.data) v = static_cast<float>(rng.uniform());
  return img;
}

ModelConfig tiny_config() {
  ModelConfig cfg;
  cfg.dim = 8;
  cfg.heads = 2;
  cfg.template_size = 32;
  cfg.search_size = 64;
  return cfg;
}

TEST(Embeddings, PatchifyUnpatchifyRoundTrip) {
  Rng rng(2);
  const Image img = random_image(48, 32, rng);
  const auto patches = patchify<float>(img, 16);
  ASSERT_EQ(patches.shape(), (Shape{6, 768}));
  const Image back = unpatchify(patches.data(), 3, 2, 16);
  EXPECT_EQ(back.data, img.data);
}

TEST(Embeddings, PatchRowsAreRowMajorOverTheGrid) {
  Image img(32, 48);
  for (std::size_t y = 0; y < 32; ++y)
    for (std::size_t x = 0; x < 48; ++x) img.at(0, y, x) = static_cast<float>((y / 16) * 3 + x / 16);
  const auto patches = patchify<double>(img, 16);
  for (std::size_t k = 0; k < 6; ++k) EXPECT_EQ(patches.at(k, 0), static_cast<double>(k));
}

TEST(Embeddings, PatchifyRejectsIndivisibleImage) {
  EXPECT_THROW(patchify<float>(Image(20, 32), 16), ShapeError);
}

TEST(Embeddings, TokenCountsAtDeskAndLargeScale) {
  const ModelConfig desk;
  EXPECT_EQ(desk.template_tokens(), 9u);
  EXPECT_EQ(desk.search_tokens(), 36u);
  const ModelConfig large = ModelConfig::large_scale();
  EXPECT_EQ(large.template_tokens(), 49u);
  EXPECT_EQ(large.search_tokens(), 196u);
}

TEST(Embeddings, PatchEmbedIsAffineInPixels) {
  // With the positional term removed the embedding is linear: E(a + 2b) = E(a) + 2E(b).
  const ModelConfig cfg = tiny_config();
  Rng rng(4);
  auto params = EmbeddingParams<double>::init(cfg, rng);
  params.pos_search = Tensor<double>::zeros(params.pos_search.shape());
  // Dyadic pixel values keep a + 2b exact in float.
  Image a(64, 64), b(64, 64);
  for (auto& v : a.data) v = static_cast<float>(rng.index(256)) / 256.0f;
  for (auto& v : b.data) v = static_cast<float>(rng.index(256)) / 256.0f;
  Image c = a;
  for (std::size_t i = 0; i < c.data.size(); ++i) c.data[i] = a.data[i] + 2.0f * b.data[i];
  const auto ea = patch_embed<double>({a, CropKind::kSearch}, params, cfg);
  const auto eb = patch_embed<double>({b, CropKind::kSearch}, params, cfg);
  const auto ec = patch_embed<double>({c, CropKind::kSearch}, params, cfg);
  ASSERT_EQ(ec.shape(), (Shape{16, 8}));
  for (std::size_t i = 0; i < ec.numel(); ++i) EXPECT_NEAR(ec.at(i), ea.at(i) + 2.0 * eb.at(i), 1e-9);
}

TEST(Embeddings, PatchEmbedAddsPositionPerToken) {
  const ModelConfig cfg = tiny_config();
  Rng rng(5);
  const auto params = EmbeddingParams<double>::init(cfg, rng);
  const auto e = patch_embed<double>({Image(32, 32), CropKind::kTemplate}, params, cfg);
  ASSERT_EQ(e.shape(), (Shape{4, 8}));
  for (std::size_t i = 0; i < e.numel(); ++i) EXPECT_EQ(e.at(i), params.pos_template.at(i));
}

TEST(Embeddings, PatchEmbedChecksCropSize) {
  const ModelConfig cfg = tiny_config();
  Rng rng(5);
  const auto params = EmbeddingParams<float>::init(cfg, rng);
  EXPECT_THROW(patch_embed<float>({Image(64, 64), CropKind::kTemplate}, params, cfg), ShapeError);
}

TEST(Embeddings, MultiscalePatchifyKeepsTemplateGrid) {
  const ModelConfig cfg = tiny_config();
  Rng rng(6);
  const ImageCrop tmpl{random_image(32, 32, rng), CropKind::kTemplate};
  for (std::size_t p : cfg.prompt_scales) {
    const auto proj = Tensor<double>::full({3 * p * p, 8}, 0.0);
    const auto out = multiscale_patchify<double>(tmpl, p, proj, cfg);
    EXPECT_EQ(out.shape(), (Shape{4, 8}));
  }
  const auto proj = Tensor<double>::zeros({3 * 15 * 15, 8});
  EXPECT_THROW(multiscale_patchify<double>(tmpl, 15, proj, cfg), std::invalid_argument);
}

TEST(Embeddings, StandardizeMatchesPerChannelFormula) {
  Image img(2, 2, 0.5f);
  const Image out = standardize(img, {0.5f, 0.25f, 0.0f}, {1.0f, 0.5f, 2.0f});
  EXPECT_FLOAT_EQ(out.at(0, 1, 1), 0.0f);
  EXPECT_FLOAT_EQ(out.at(1, 0, 0), 0.5f);
  EXPECT_FLOAT_EQ(out.at(2, 1, 0), 0.25f);
}

}  // namespace
}  // namespace evp
