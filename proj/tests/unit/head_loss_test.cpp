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

#include "evptrack/head_loss.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "evptrack/grad_check.hpp"
#include "oracles.hpp"

namespace evp {
namespace {

using oracle::random_box;
using oracle::random_tensor;

// Output maps with every cell holding the same offset and size.
HeadOutput<double> uniform_output(std::size_t s, double off, double w, double h, double score = 0.1) {
  HeadOutput<double> out;
  out.grid = s;
  out.score = Tensor<double>::full({s, s}, score, true);
  std::vector<double> o(2 * s * s, off), sz(2 * s * s);
  for (std::size_t k = 0; k < s * s; ++k) {
    sz[k] = w;
    sz[s * s + k] = h;
  }
  out.offset = Tensor<double>({2, s, s}, o, true);
  out.size = Tensor<double>({2, s, s}, sz, true);
  return out;
}

TEST(Giou, HandComputedExamples) {
  EXPECT_NEAR(giou(BBox{0, 0, 2, 2}, BBox{1, 1, 2, 2}), -5.0 / 63.0, 1e-15);
  EXPECT_NEAR(iou(BBox{0, 0, 2, 2}, BBox{1, 1, 2, 2}), 1.0 / 7.0, 1e-15);
  // Disjoint unit squares side by side with a gap of one: enclosure 3, union 2.
  EXPECT_NEAR(giou(BBox{0, 0, 1, 1}, BBox{2, 0, 1, 1}), -1.0 / 3.0, 1e-15);
  EXPECT_EQ(iou(BBox{0, 0, 1, 1}, BBox{2, 0, 1, 1}), 0.0);
}

TEST(Giou, SelfIsExactlyOne) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const BBox a = random_box(rng, rng.uniform(0.5, 500.0));
    EXPECT_EQ(giou(a, a), 1.0);
    EXPECT_EQ(iou(a, a), 1.0);
  }
}

TEST(Giou, MatchesDirectOracleAndIsSymmetricAndBounded) {
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const BBox a = random_box(rng), b = random_box(rng);
    const double g = giou(a, b);
    EXPECT_NEAR(g, oracle::giou(a, b), 1e-9);
    EXPECT_NEAR(g, giou(b, a), 1e-15);
    EXPECT_LE(g, iou(a, b) + 1e-15);
    EXPECT_GT(g, -1.0);
    EXPECT_LE(g, 1.0);
  }
}

TEST(Giou, MatchesRasterOracle) {
  Rng rng(3);
  for (int i = 0; i < 40; ++i) {
    const BBox a = random_box(rng), b = random_box(rng);
    const auto r = oracle::raster_giou(a, b, 512);
    EXPECT_NEAR(giou(a, b), r.giou, 2e-2);
    EXPECT_NEAR(iou(a, b), r.iou, 2e-2);
  }
}

TEST(Giou, RejectsZeroArea) {
  EXPECT_THROW(giou(BBox{0, 0, 0, 1}, BBox{0, 0, 1, 1}), std::invalid_argument);
}

TEST(Giou, LossValueAndGradient) {
  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    const BBox gt = random_box(rng), p = random_box(rng);
    const Tensor<double> c({4}, {p.x, p.y, p.right(), p.bottom()}, true);
    EXPECT_NEAR(giou_loss(c, gt).item(), 1.0 - oracle::giou(p, gt), 1e-12);
    const auto r = grad_check<double>([&](const Tensor<double>& x) { return giou_loss(x, gt); }, c);
    EXPECT_LT(r.max_rel_error, 1e-6) << r.worst_index;
  }
}

TEST(Head, CenterCellAndGaussianTarget) {
  const BBox centered = BBox::from_center(0.5, 0.5, 0.2, 0.2);
  EXPECT_EQ(center_cell(centered, 14), (Cell{7, 7}));
  EXPECT_EQ(center_cell(BBox::from_center(1.0, 0.0, 0.1, 0.1), 6), (Cell{0, 5}));
  const auto t = make_gaussian_target(centered, 14);
  EXPECT_EQ(t.heatmap[7 * 14 + 7], 1.0);
  std::size_t peaks = 0;
  for (double v : t.heatmap) {
    EXPECT_GT(v, 0.0);
    EXPECT_LE(v, 1.0);
    peaks += v == 1.0;
  }
  EXPECT_EQ(peaks, 1u);
  EXPECT_NEAR(t.heatmap[7 * 14 + 8], std::exp(-1.0 / (2 * t.sigma * t.sigma)), 1e-15);
}

TEST(Head, FocalLossMatchesCellLoopOracle) {
  Rng rng(5);
  const LossConfig cfg;
  for (int i = 0; i < 10; ++i) {
    const auto score = random_tensor<double>({6, 6}, rng, 0.0, 1.0);
    const auto target = make_gaussian_target(random_box(rng), 6);
    const std::vector<double> pred(score.data().begin(), score.data().end());
    const double want = oracle::focal(pred, target.heatmap, cfg.focal_alpha, cfg.focal_beta, cfg.clamp_eps);
    const double got = focal_loss(score, target, cfg).item();
    EXPECT_NEAR(got, want, 1e-12);
    EXPECT_GE(got, 0.0);
  }
}

TEST(Head, FocalLossVanishesOnPerfectMap) {
  const auto target = make_gaussian_target(BBox::from_center(0.3, 0.6, 0.1, 0.1), 6);
  std::vector<double> p(36, 0.0);
  p[target.peak.row * 6 + target.peak.col] = 1.0;
  EXPECT_LT(focal_loss(Tensor<double>({6, 6}, p), target, LossConfig{}).item(), 1e-5);
}

TEST(Head, DecodeFollowsCellOffsetAndSize) {
  const auto out = uniform_output(14, 0.5, 0.25, 0.25);
  const BBox b = decode_box(out, Cell{7, 7});
  EXPECT_NEAR(b.cx(), 7.5 / 14.0, 1e-12);
  EXPECT_NEAR(b.cy(), 7.5 / 14.0, 1e-12);
  EXPECT_NEAR(b.w, 0.25, 1e-12);
  EXPECT_NEAR(b.h, 0.25, 1e-12);
}

TEST(Head, DecodeClampsToUnitSquare) {
  const auto out = uniform_output(4, 0.0, 0.9, 0.9);
  const BBox b = decode_box(out, Cell{0, 0});
  EXPECT_EQ(b.x, 0.0);
  EXPECT_EQ(b.y, 0.0);
  EXPECT_NEAR(b.w, 0.45, 1e-12);
}

TEST(Head, ArgmaxIsFirstMaxRowMajorAndScaleInvariant) {
  std::vector<double> m{0.1, 0.7, 0.3, 0.7, 0.2, 0.0, 0.5, 0.6, 0.1};
  EXPECT_EQ(argmax_cell<double>(m, 3), (Cell{0, 1}));
  for (auto& v : m) v *= 3.5;
  EXPECT_EQ(argmax_cell<double>(m, 3), (Cell{0, 1}));
  EXPECT_THROW(argmax_cell<double>(m, 2), ShapeError);
}

TEST(Head, ExactBoxLeavesOnlyClassificationLoss) {
  const std::size_t s = 6;
  const BBox gt = BBox::from_center(2.5 / 6, 3.5 / 6, 0.3, 0.2);
  const auto out = uniform_output(s, 0.5, 0.3, 0.2);
  const auto terms = total_loss(out, gt, LossConfig{});
  EXPECT_NEAR(terms.l1.item(), 0.0, 1e-12);
  EXPECT_NEAR(terms.giou.item(), 0.0, 1e-12);
  EXPECT_NEAR(terms.total.item(), terms.cls.item(), 1e-12);
}

TEST(Head, TotalIsWeightedSum) {
  const BBox gt = BBox::from_center(0.4, 0.4, 0.3, 0.3);
  const auto out = uniform_output(6, 0.2, 0.2, 0.4, 0.3);
  LossConfig cfg;
  const auto t = total_loss(out, gt, cfg);
  EXPECT_NEAR(t.total.item(), t.cls.item() + cfg.lambda_l1 * t.l1.item() + cfg.lambda_giou * t.giou.item(), 1e-12);
  cfg.lambda_l1 = cfg.lambda_giou = 0.0;
  EXPECT_NEAR(total_loss(out, gt, cfg).total.item(), t.cls.item(), 1e-15);
}

TEST(Head, ForwardProducesMapsInUnitRange) {
  ModelConfig cfg;
  cfg.dim = 8;
  Rng rng(6);
  const auto params = HeadParams<double>::init(cfg, rng);
  const auto out = head_forward(random_tensor<double>({36, 8}, rng, -2.0, 2.0), params);
  EXPECT_EQ(out.grid, 6u);
  EXPECT_EQ(out.score.shape(), (Shape{6, 6}));
  EXPECT_EQ(out.offset.shape(), (Shape{2, 6, 6}));
  for (const auto* t : {&out.score, &out.offset, &out.size})
    for (double v : t->data()) {
      EXPECT_GT(v, 0.0);
      EXPECT_LT(v, 1.0);
    }
  EXPECT_THROW(head_forward(random_tensor<double>({35, 8}, rng), params), ShapeError);
}

}  // namespace
}  // namespace evp
