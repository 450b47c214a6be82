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

#include "evptrack/encoders.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "evptrack/errors.hpp"
#include "oracles.hpp"

namespace evp {
namespace {

using oracle::Matrix;
using oracle::random_tensor;

ModelConfig small_config() {
  ModelConfig cfg;
  cfg.dim = 8;
  cfg.heads = 2;
  cfg.depth = 2;
  cfg.mlp_ratio = 2;
  cfg.init_std = 0.3;
  return cfg;
}

// Randomizes every parameter so the layer norms and biases are not at identity.
void perturb(EncoderLayerParams<double>& p, Rng& rng) {
  for (Tensor<double>* t : {&p.norm1.gamma, &p.norm1.beta, &p.norm2.gamma, &p.norm2.beta, &p.qkv.bias,
                            &p.proj.bias, &p.mlp.fc1.bias, &p.mlp.fc2.bias})
    for (auto& v : t->mutable_data()) v += rng.uniform(-0.5, 0.5);
}

Matrix linear(const Matrix& x, const Tensor<double>& w, const Tensor<double>& b) {
  Matrix y = oracle::matmul(x, oracle::to_matrix(w));
  for (auto& row : y)
    for (std::size_t j = 0; j < row.size(); ++j) row[j] += b.at(j);
  return y;
}

Matrix norm(const Matrix& x, const LayerNormParams<double>& p, double eps) {
  Matrix y;
  for (const auto& row : x) {
    auto z = oracle::layer_norm(row, eps);
    for (std::size_t j = 0; j < z.size(); ++j) z[j] = z[j] * p.gamma.at(j) + p.beta.at(j);
    y.push_back(z);
  }
  return y;
}

// Pre-norm transformer layer written out with plain loops.
Matrix reference_layer(const Matrix& x, const EncoderLayerParams<double>& p, double eps) {
  const std::size_t n = x.size(), d = x[0].size(), hd = d / p.heads;
  const Matrix qkv = linear(norm(x, p.norm1, eps), p.qkv.weight, p.qkv.bias);
  Matrix mixed(n, std::vector<double>(d, 0.0));
  for (std::size_t h = 0; h < p.heads; ++h)
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> logits(n);
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t c = 0; c < hd; ++c) s += qkv[i][h * hd + c] * qkv[j][d + h * hd + c];
        logits[j] = s / std::sqrt(static_cast<double>(hd));
      }
      const auto a = oracle::softmax(logits);
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t c = 0; c < hd; ++c) mixed[i][h * hd + c] += a[j] * qkv[j][2 * d + h * hd + c];
    }
  Matrix h1 = linear(mixed, p.proj.weight, p.proj.bias);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) h1[i][j] += x[i][j];
  Matrix hidden = linear(norm(h1, p.norm2, eps), p.mlp.fc1.weight, p.mlp.fc1.bias);
  for (auto& row : hidden)
    for (auto& v : row) v = oracle::gelu(v);
  Matrix out = linear(hidden, p.mlp.fc2.weight, p.mlp.fc2.bias);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) out[i][j] += h1[i][j];
  return out;
}

TEST(Encoders, LayerMatchesLoopOracle) {
  const ModelConfig cfg = small_config();
  Rng rng(8);
  auto p = EncoderLayerParams<double>::init(cfg, rng);
  perturb(p, rng);
  const auto x = random_tensor<double>({7, 8}, rng, -2.0, 2.0);
  const auto got = encoder_layer(x, p, 1e-5);
  const auto want = reference_layer(oracle::to_matrix(x), p, 1e-5);
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < 8; ++j) EXPECT_NEAR(got.at(i, j), want[i][j], 1e-10);
}

TEST(Encoders, LayerIsPermutationEquivariant) {
  const ModelConfig cfg = small_config();
  Rng rng(9);
  const auto p = EncoderLayerParams<double>::init(cfg, rng);
  const auto x = random_tensor<double>({5, 8}, rng);
  const std::vector<std::size_t> perm{3, 0, 4, 1, 2};
  std::vector<std::size_t> flat;
  for (std::size_t r : perm)
    for (std::size_t c = 0; c < 8; ++c) flat.push_back(r * 8 + c);
  const auto y = encoder_layer(x, p, 1e-5);
  const auto yp = encoder_layer(reshape(gather(x, flat), {5, 8}), p, 1e-5);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 8; ++j) EXPECT_NEAR(yp.at(i, j), y.at(perm[i], j), 1e-12);
}

TEST(Encoders, AttentionRowsSumToOne) {
  const ModelConfig cfg = small_config();
  Rng rng(10);
  const auto params = ImagePromptEncoderParams<double>::init(cfg, rng);
  const TokenSet<double> tokens{random_tensor<double>({9, 8}, rng, -3.0, 3.0),
                                random_tensor<double>({36, 8}, rng, -3.0, 3.0)};
  AttentionTrace<double> trace;
  image_prompt_encode(random_tensor<double>({4, 8}, rng), tokens, params, 1e-5, &trace);
  ASSERT_EQ(trace.weights.size(), cfg.depth * cfg.heads);
  for (const auto& w : trace.weights) {
    ASSERT_EQ(w.shape(), (Shape{49, 49}));
    for (std::size_t i = 0; i < 49; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < 49; ++j) {
        EXPECT_GE(w.at(i, j), 0.0);
        s += w.at(i, j);
      }
      EXPECT_NEAR(s, 1.0, 1e-6);
    }
  }
}

TEST(Encoders, LayerNormBeforeAffineHasZeroMean) {
  Rng rng(12);
  const auto x = random_tensor<float>({16, 64}, rng, 50.0, 90.0);
  const auto y = layer_norm(x, Tensor<float>::full({64}, 1.0f), Tensor<float>::zeros({64}), 1e-5f);
  for (std::size_t i = 0; i < 16; ++i) {
    double s = 0.0, s2 = 0.0;
    for (std::size_t j = 0; j < 64; ++j) {
      s += y.at(i, j);
      s2 += static_cast<double>(y.at(i, j)) * y.at(i, j);
    }
    EXPECT_LT(std::abs(s / 64), 1e-5);
    EXPECT_NEAR(s2 / 64, 1.0, 1e-3);
  }
}

TEST(Encoders, FusedSegmentsPartitionTheSequence) {
  const ModelConfig cfg = small_config();
  Rng rng(13);
  const auto params = ImagePromptEncoderParams<double>::init(cfg, rng);
  const TokenSet<double> tokens{random_tensor<double>({9, 8}, rng), random_tensor<double>({36, 8}, rng)};
  const auto fused = image_prompt_encode(random_tensor<double>({4, 8}, rng), tokens, params, 1e-5);
  EXPECT_EQ(fused.segments.total(), 49u);
  EXPECT_EQ(fused.tokens.dim(0), 49u);
  EXPECT_EQ(fused.prompt_part().dim(0), 4u);
  EXPECT_EQ(fused.template_part().dim(0), 9u);
  EXPECT_EQ(fused.search_part().dim(0), 36u);
  EXPECT_EQ(fused.search_part().at(0, 0), fused.tokens.at(13, 0));

  const auto bare = image_prompt_encode(Tensor<double>{}, tokens, params, 1e-5);
  EXPECT_EQ(bare.segments.prompts, 0u);
  EXPECT_FALSE(bare.prompt_part().defined());
  EXPECT_EQ(bare.tokens.dim(0), 45u);
}

TEST(Encoders, LargeScaleFusedLengthIs249) {
  const ModelConfig cfg = ModelConfig::large_scale();
  EXPECT_EQ(cfg.num_prompts() + cfg.template_tokens() + cfg.search_tokens(), 249u);
}

TEST(Encoders, SpatioTemporalOutputMatchesStateShape) {
  const ModelConfig cfg = small_config();
  Rng rng(14);
  const auto params = SpatioTemporalEncoderParams<double>::init(cfg, rng);
  const auto z = random_tensor<double>({9, 8}, rng);
  const auto x = random_tensor<double>({36, 8}, rng);
  const auto out = spatio_temporal_encode(z, z, x, params, 1e-5);
  EXPECT_EQ(out.shape(), z.shape());
  EXPECT_THROW(spatio_temporal_encode(random_tensor<double>({4, 8}, rng), z, x, params, 1e-5), ShapeError);
}

TEST(Encoders, LayerRejectsWrongWidth) {
  const ModelConfig cfg = small_config();
  Rng rng(15);
  const auto p = EncoderLayerParams<float>::init(cfg, rng);
  EXPECT_THROW(encoder_layer(Tensor<float>::zeros({3, 6}), p, 1e-5f), ShapeError);
}

}  // namespace
}  // namespace evp
