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

#include "evptrack/tensor.hpp"

#include <gtest/gtest.h>

#include "evptrack/ops.hpp"

namespace evp {
namespace {

TEST(Tensor, ConstructionChecksSize) {
  EXPECT_THROW(Tensor<float>({2, 3}, std::vector<float>(5)), ShapeError);
  EXPECT_THROW(Tensor<float>({2, 0}, {}), ShapeError);
  const Tensor<float> t({2, 3}, {1, 2, 3, 4, 5, 6});
  EXPECT_EQ(t.numel(), 6u);
  EXPECT_EQ(t.rank(), 2u);
  EXPECT_EQ(t.at(1, 2), 6.0f);
  EXPECT_EQ(shape_str(t.shape()), "[2,3]");
}

TEST(Tensor, HandlesShareStorage) {
  Tensor<double> a = Tensor<double>::zeros({3}, true);
  Tensor<double> b = a;
  b.mutable_data()[1] = 4.0;
  EXPECT_EQ(a.at(1), 4.0);
}

TEST(Tensor, ItemNeedsScalar) {
  EXPECT_THROW(Tensor<float>::zeros({2}).item(), ShapeError);
  EXPECT_EQ(Tensor<float>::scalar(3.5f).item(), 3.5f);
}

TEST(Tensor, SetRequiresGradOnlyOnLeaves) {
  Tensor<double> a = Tensor<double>::full({2}, 1.0, true);
  Tensor<double> b = scale(a, 2.0);
  EXPECT_THROW(b.set_requires_grad(false), std::logic_error);
}

TEST(Tensor, BackwardAccumulatesThroughSharedSubgraph) {
  // y = sum(x*x + x) -> dy/dx = 2x + 1; x feeds two paths.
  Tensor<double> x({3}, {1.0, -2.0, 0.5}, true);
  const Tensor<double> y = sum(add(mul(x, x), x));
  y.backward();
  const std::vector<double> expect{3.0, -3.0, 2.0};
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(x.grad()[i], expect[i]);

  // A second backward adds to the leaf gradient.
  y.backward();
  EXPECT_DOUBLE_EQ(x.grad()[0], 6.0);
  x.zero_grad();
  EXPECT_DOUBLE_EQ(x.grad()[0], 0.0);
}

TEST(Tensor, BackwardRequiresScalar) {
  Tensor<double> x({2}, {1.0, 2.0}, true);
  EXPECT_THROW(scale(x, 2.0).backward(), ShapeError);
}

TEST(Tensor, NoGradGuardStopsRecording) {
  Tensor<double> x({2}, {1.0, 2.0}, true);
  {
    NoGradGuard guard;
    EXPECT_FALSE(grad_enabled());
    const Tensor<double> y = scale(x, 3.0);
    EXPECT_FALSE(y.requires_grad());
  }
  EXPECT_TRUE(grad_enabled());
  EXPECT_TRUE(scale(x, 3.0).requires_grad());
}

TEST(Tensor, DetachCopiesValuesWithoutHistory) {
  Tensor<double> x({2}, {1.0, 2.0}, true);
  const Tensor<double> d = scale(x, 2.0).detach();
  EXPECT_FALSE(d.requires_grad());
  EXPECT_EQ(d.at(1), 4.0);
  const Tensor<double> y = sum(mul(d, x));
  y.backward();
  EXPECT_DOUBLE_EQ(x.grad()[0], 2.0);  // only the direct path
}

TEST(Tensor, NonFiniteResultsThrow) {
  const Tensor<double> x({2}, {0.0, 1.0});
  EXPECT_THROW(log(x), NumericError);
  const Tensor<float> big({1}, {100.0f});
  EXPECT_THROW(exp(big), NumericError);
}

TEST(Tensor, CastPreservesValues) {
  const Tensor<double> d({3}, {0.25, -1.5, 3.0});
  const Tensor<float> f = cast<float>(d);
  EXPECT_EQ(f.shape(), d.shape());
  EXPECT_EQ(f.at(1), -1.5f);
}

}  // namespace
}  // namespace evp
