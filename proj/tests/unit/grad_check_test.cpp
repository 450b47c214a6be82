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

#include "evptrack/grad_check.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "evptrack/grad_suite.hpp"
#include "evptrack/ops.hpp"
#include "oracles.hpp"

namespace evp {
namespace {

TEST(GradCheck, AcceptsCorrectGradient) {
  Rng rng(1);
  const auto x = oracle::random_tensor<double>({3, 3}, rng, -1.0, 1.0, true);
  const auto r = grad_check<double>([](const Tensor<double>& v) { return sum(mul(v, exp(v))); }, x);
  EXPECT_LT(r.max_rel_error, 1e-7);
  EXPECT_EQ(r.coords_checked, 9u);
}

// An op with a deliberately wrong backward must be caught.
Tensor<double> wrong_square(const Tensor<double>& x) {
  std::vector<double> y(x.numel());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = x.data()[i] * x.data()[i];
  return detail::make_result<double>("wrong_square", x.shape(), std::move(y), {x}, [](detail::Node<double>& o) {
    auto* g = detail::parent_grad(o, 0);
    if (!g) return;
    for (std::size_t i = 0; i < g->size(); ++i) (*g)[i] += o.grad[i] * o.parents[0]->data[i];  // missing factor 2
  });
}

TEST(GradCheck, DetectsWrongGradient) {
  Tensor<double> x({3}, {0.5, -1.0, 2.0}, true);
  const auto r = grad_check<double>([](const Tensor<double>& v) { return sum(wrong_square(v)); }, x);
  EXPECT_GT(r.max_rel_error, 0.3);
  EXPECT_EQ(r.worst_leaf, "x");
}

TEST(GradCheck, RestoresPerturbedValues) {
  Tensor<double> x({2}, {0.3, 0.7}, true);
  grad_check<double>([](const Tensor<double>& v) { return sum(mul(v, v)); }, x);
  EXPECT_EQ(x.at(0), 0.3);
  EXPECT_EQ(x.at(1), 0.7);
}

TEST(GradCheck, SamplesCoordinatesWhenAsked) {
  Rng rng(2);
  const auto x = oracle::random_tensor<double>({10, 10}, rng, -1.0, 1.0, true);
  GradCheckOptions o;
  o.max_coords = 7;
  const auto r = grad_check<double>([](const Tensor<double>& v) { return sum(gelu(v)); }, x, o);
  EXPECT_EQ(r.coords_checked, 7u);
}

TEST(GradSuite, SingleSeedPasses) {
  GradSuiteOptions o;
  o.seeds = {42};
  const auto cases = run_grad_suite(o);
  EXPECT_GT(cases.size(), 30u);
  for (const auto& c : cases) EXPECT_TRUE(c.passed()) << c.name << " rel err " << c.result.max_rel_error;
}

}  // namespace
}  // namespace evp
