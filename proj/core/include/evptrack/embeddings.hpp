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
#include <string>

#include "evptrack/config.hpp"
#include "evptrack/image.hpp"
#include "evptrack/layers.hpp"

namespace evp {

enum class CropKind { kTemplate, kSearch };

struct ImageCrop {
  Image pixels;
  CropKind kind = CropKind::kSearch;
};

/// Embedded template and search tokens (f_z, f_x).
template <typename T>
struct TokenSet {
  Tensor<T> template_tokens;  // [N_z, D]
  Tensor<T> search_tokens;    // [N_x, D]
};

template <typename T>
struct EmbeddingParams {
  Tensor<T> patch_proj;    // [3*16*16, D], no bias so the embedding stays linear
  Tensor<T> pos_template;  // [N_z, D]
  Tensor<T> pos_search;    // [N_x, D]

  static EmbeddingParams init(const ModelConfig& cfg, Rng& rng);
  void collect(ParameterList<T>& out, const std::string& prefix) const;
};

/// Cuts `img` into non-overlapping patch×patch tiles in row-major grid order.
/// Row k of the result holds tile k flattened channel-major: [c][py][px].
template <typename T>
Tensor<T> patchify(const Image& img, std::size_t patch);

/// Inverse of patchify for a grid of `grid_h` x `grid_w` tiles.
Image unpatchify(std::span<const float> patches, std::size_t grid_h, std::size_t grid_w,
                 std::size_t patch);

struct GridCoord {
  std::size_t row = 0;
  std::size_t col = 0;
};

inline GridCoord grid_coord(std::size_t index, std::size_t grid_w) {
  return {index / grid_w, index % grid_w};
}
inline std::size_t grid_index(GridCoord c, std::size_t grid_w) { return c.row * grid_w + c.col; }

/// Per-channel (x - mean) / std.
Image standardize(const Image& img, const std::array<float, 3>& mean, const std::array<float, 3>& std);

/// Stride-16 patch projection plus the positional encoding of the crop's kind.
/// The crop must have the configured size for its kind.
template <typename T>
Tensor<T> patch_embed(const ImageCrop& crop, const EmbeddingParams<T>& params, const ModelConfig& cfg);

/// Resamples the template to (P*G)² with G = H_z / 16, cuts G² tiles of P×P,
/// and projects each with `proj` ([3*P*P, D]). Every scale yields G² tokens.
template <typename T>
Tensor<T> multiscale_patchify(const ImageCrop& tmpl, std::size_t scale, const Tensor<T>& proj,
                              const ModelConfig& cfg);

}  // namespace evp
