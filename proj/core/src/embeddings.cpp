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

#include <algorithm>

namespace evp {

namespace {

std::size_t expected_size(CropKind kind, const ModelConfig& cfg) {
  return kind == CropKind::kTemplate ? cfg.template_size : cfg.search_size;
}

}  // namespace

template <typename T>
EmbeddingParams<T> EmbeddingParams<T>::init(const ModelConfig& cfg, Rng& rng) {
  const std::size_t in = Image::kChannels * kPatchStride * kPatchStride;
  EmbeddingParams p;
  p.patch_proj = init_truncated_normal<T>({in, cfg.dim}, cfg.init_std, rng);
  p.pos_template = init_truncated_normal<T>({cfg.template_tokens(), cfg.dim}, cfg.init_std, rng);
  p.pos_search = init_truncated_normal<T>({cfg.search_tokens(), cfg.dim}, cfg.init_std, rng);
  return p;
}

template <typename T>
void EmbeddingParams<T>::collect(ParameterList<T>& out, const std::string& prefix) const {
  out.push_back({prefix + ".patch_proj", patch_proj, ParamGroup::kBackbone});
  out.push_back({prefix + ".pos_template", pos_template, ParamGroup::kBackbone});
  out.push_back({prefix + ".pos_search", pos_search, ParamGroup::kBackbone});
}

template <typename T>
Tensor<T> patchify(const Image& img, std::size_t patch) {
  if (patch == 0 || img.empty() || img.height % patch != 0 || img.width % patch != 0) {
    throw ShapeError("patchify: image " + std::to_string(img.height) + "x" + std::to_string(img.width) +
                     " is not divisible into " + std::to_string(patch) + "-pixel patches");
  }
  const std::size_t gh = img.height / patch, gw = img.width / patch;
  const std::size_t len = Image::kChannels * patch * patch;
  std::vector<T> out(gh * gw * len);
  for (std::size_t gy = 0; gy < gh; ++gy)
    for (std::size_t gx = 0; gx < gw; ++gx) {
      T* row = out.data() + (gy * gw + gx) * len;
      for (std::size_t c = 0; c < Image::kChannels; ++c)
        for (std::size_t py = 0; py < patch; ++py)
          for (std::size_t px = 0; px < patch; ++px)
            row[(c * patch + py) * patch + px] = static_cast<T>(img.at(c, gy * patch + py, gx * patch + px));
    }
  return Tensor<T>({gh * gw, len}, std::move(out));
}

Image unpatchify(std::span<const float> patches, std::size_t grid_h, std::size_t grid_w,
                 std::size_t patch) {
  const std::size_t len = Image::kChannels * patch * patch;
  if (patches.size() != grid_h * grid_w * len) throw ShapeError("unpatchify: size mismatch");
  Image img(grid_h * patch, grid_w * patch);
  for (std::size_t k = 0; k < grid_h * grid_w; ++k) {
    const GridCoord g = grid_coord(k, grid_w);
    for (std::size_t c = 0; c < Image::kChannels; ++c)
      for (std::size_t py = 0; py < patch; ++py)
        for (std::size_t px = 0; px < patch; ++px)
          img.at(c, g.row * patch + py, g.col * patch + px) = patches[k * len + (c * patch + py) * patch + px];
  }
  return img;
}

Image standardize(const Image& img, const std::array<float, 3>& mean, const std::array<float, 3>& std) {
  Image out = img;
  const std::size_t plane = img.height * img.width;
  for (std::size_t c = 0; c < Image::kChannels; ++c)
    for (std::size_t i = 0; i < plane; ++i)
      out.data[c * plane + i] = (img.data[c * plane + i] - mean[c]) / std[c];
  return out;
}

template <typename T>
Tensor<T> patch_embed(const ImageCrop& crop, const EmbeddingParams<T>& params, const ModelConfig& cfg) {
  const std::size_t size = expected_size(crop.kind, cfg);
  if (crop.pixels.height != size || crop.pixels.width != size) {
    throw ShapeError("patch_embed: " + std::string(crop.kind == CropKind::kTemplate ? "template" : "search") +
                     " crop is " + std::to_string(crop.pixels.height) + "x" + std::to_string(crop.pixels.width) +
                     ", expected " + std::to_string(size) + "x" + std::to_string(size));
  }
  const Tensor<T> patches = patchify<T>(crop.pixels, kPatchStride);
  const Tensor<T>& pos = crop.kind == CropKind::kTemplate ? params.pos_template : params.pos_search;
  return add(matmul(patches, params.patch_proj), pos);
}

template <typename T>
Tensor<T> multiscale_patchify(const ImageCrop& tmpl, std::size_t scale, const Tensor<T>& proj,
                              const ModelConfig& cfg) {
  if (tmpl.kind != CropKind::kTemplate) throw std::invalid_argument("multiscale_patchify: needs a template crop");
  if (std::find(cfg.prompt_scales.begin(), cfg.prompt_scales.end(), scale) == cfg.prompt_scales.end()) {
    throw std::invalid_argument("multiscale_patchify: unsupported patch size " + std::to_string(scale));
  }
  if (tmpl.pixels.height != cfg.template_size || tmpl.pixels.width != cfg.template_size) {
    throw ShapeError("multiscale_patchify: template crop has the wrong size");
  }
  const std::size_t grid = cfg.template_grid();
  const Image resampled = resize_bilinear(tmpl.pixels, scale * grid, scale * grid);
  return matmul(patchify<T>(resampled, scale), proj);
}

#define EVP_INSTANTIATE_EMBED(T)                                                                 \
  template struct EmbeddingParams<T>;                                                           \
  template Tensor<T> patchify<T>(const Image&, std::size_t);                                    \
  template Tensor<T> patch_embed<T>(const ImageCrop&, const EmbeddingParams<T>&, const ModelConfig&); \
  template Tensor<T> multiscale_patchify<T>(const ImageCrop&, std::size_t, const Tensor<T>&,    \
                                            const ModelConfig&);

EVP_INSTANTIATE_EMBED(float)
EVP_INSTANTIATE_EMBED(double)

}  // namespace evp
