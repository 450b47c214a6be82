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

#include "evptrack/prompts.hpp"

#include <cstring>

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace evp {
namespace {

using oracle::random_tensor;

ModelConfig small_config(PromptMode mode = PromptMode::kBoth) {
  ModelConfig cfg;
  cfg.dim = 8;
  cfg.heads = 2;
  cfg.depth = 1;
  cfg.mlp_ratio = 2;
  cfg.template_size = 32;
  cfg.search_size = 64;
  cfg.prompts = mode;
  return cfg;
}

template <typename T>
bool bitwise_equal(const Tensor<T>& a, const Tensor<T>& b) {
  return a.shape() == b.shape() && std::memcmp(a.data().data(), b.data().data(), a.numel() * sizeof(T)) == 0;
}

TEST(Prompts, InitialStateIsTheTemplateTokens) {
  Rng rng(1);
  const auto z = random_tensor<float>({4, 8}, rng);
  const auto s0 = init_state(z, 17);
  EXPECT_TRUE(bitwise_equal(s0.tokens, z));
  EXPECT_EQ(s0.frame_index, 0u);
  EXPECT_EQ(s0.video_id, 17u);
}

TEST(Prompts, StateShapeIsStationaryOverManyUpdates) {
  const ModelConfig cfg = small_config();
  Rng rng(2);
  const auto enc = SpatioTemporalEncoderParams<float>::init(cfg, rng);
  const auto z = random_tensor<float>({4, 8}, rng);
  NoGradGuard no_grad;
  auto state = init_state(z, 3);
  for (std::size_t t = 1; t <= 120; ++t) {
    state = update_state(state, z, random_tensor<float>({16, 8}, rng), enc, 1e-5f);
    ASSERT_EQ(state.tokens.shape(), z.shape());
    ASSERT_EQ(state.frame_index, t);
    for (float v : state.tokens.data()) ASSERT_TRUE(std::isfinite(v));
  }
  EXPECT_EQ(state.video_id, 3u);
}

TEST(Prompts, SpatioTemporalPromptPoolsThenProjects) {
  Rng rng(3);
  const auto ffn = FeedForward<double>::init(8, 16, 8, 0.3, rng);
  const auto state = random_tensor<double>({5, 8}, rng);
  const auto got = gen_spatiotemporal_prompt(state, ffn);
  ASSERT_EQ(got.shape(), (Shape{1, 8}));
  std::vector<double> pooled(8, 0.0);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 8; ++j) pooled[j] += state.at(i, j) / 5.0;
  const auto want = ffn(Tensor<double>({1, 8}, pooled));
  for (std::size_t j = 0; j < 8; ++j) EXPECT_NEAR(got.at(0, j), want.at(0, j), 1e-12);
}

TEST(Prompts, MultiscalePromptHasOneTokenPerScale) {
  const ModelConfig cfg = small_config();
  Rng rng(4);
  const auto params = PromptParams<double>::init(cfg, rng);
  Image img(32, 32);
  for (auto& v : img.data) v = static_cast<float>(rng.uniform());
  const auto p = gen_multiscale_prompt<double>({img, CropKind::kTemplate}, params, cfg);
  EXPECT_EQ(p.shape(), (Shape{3, 8}));
}

TEST(Prompts, CountsPerMode) {
  Rng rng(5);
  const auto ms = random_tensor<float>({3, 8}, rng);
  const auto st = random_tensor<float>({1, 8}, rng);
  const std::pair<PromptMode, std::size_t> cases[] = {{PromptMode::kNone, 0},
                                                       {PromptMode::kMultiScale, 3},
                                                       {PromptMode::kSpatioTemporal, 1},
                                                       {PromptMode::kBoth, 4},
                                                       {PromptMode::kLearnable, 4}};
  for (const auto& [mode, count] : cases) {
    const ModelConfig cfg = small_config(mode);
    Rng prng(6);
    const auto params = PromptParams<float>::init(cfg, prng);
    const auto set = prompts_for_mode<float>(cfg, params, ms, st);
    EXPECT_EQ(set.size(), count) << to_string(mode);
    EXPECT_EQ(cfg.num_prompts(), count) << to_string(mode);
    if (count == 0) EXPECT_FALSE(set.tokens.defined());
    else EXPECT_EQ(set.tokens.dim(0), count);
  }
}

TEST(Prompts, BothModePutsMultiscaleFirst) {
  Rng rng(7);
  const auto ms = random_tensor<double>({3, 8}, rng);
  const auto st = random_tensor<double>({1, 8}, rng);
  const auto set = assemble_prompts<double>(ms, st);
  EXPECT_EQ(set.multiscale, 3u);
  EXPECT_EQ(set.spatiotemporal, 1u);
  EXPECT_EQ(set.tokens.at(0, 0), ms.at(0, 0));
  EXPECT_EQ(set.tokens.at(3, 5), st.at(0, 5));
}

TEST(Prompts, PromptModeNamesRoundTrip) {
  for (PromptMode m : {PromptMode::kNone, PromptMode::kMultiScale, PromptMode::kSpatioTemporal, PromptMode::kBoth,
                       PromptMode::kLearnable})
    EXPECT_EQ(parse_prompt_mode(to_string(m)), m);
}

}  // namespace
}  // namespace evp
