//
// Copyright 2026 The gradleak Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "gradleak/defense.h"

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.h"

namespace gradleak {
namespace {

using testing::random_tensor;

GradStore make_store(std::vector<double> a, std::vector<double> b) {
  GradStore g;
  const std::size_t na = a.size(), nb = b.size();
  g.blocks.emplace("a", Tensor::constant(Shape{na}, std::move(a)));
  g.blocks.emplace("b", Tensor::constant(Shape{nb}, std::move(b)));
  return g;
}

double norm(const GradStore& g) {
  double s = 0.0;
  for (double v : g.flatten()) s += v * v;
  return std::sqrt(s);
}

TEST(DpConfig, Validation) {
  DpConfig dp;
  EXPECT_NO_THROW(dp.validate());
  dp.clip_bound = 0.0;
  EXPECT_THROW(dp.validate(), ConfigError);
  dp = DpConfig{};
  dp.noise_multiplier = -1.0;
  EXPECT_THROW(dp.validate(), ConfigError);
  dp = DpConfig{};
  dp.delta = 1.0;
  EXPECT_THROW(dp.validate(), ConfigError);
  dp = DpConfig{};
  dp.clip_bound = DpConfig::kNoClip;
  EXPECT_NO_THROW(dp.validate());
  dp.noise_multiplier = 0.5;
  EXPECT_THROW(dp.validate(), ConfigError);
}

TEST(DpTransform, SmallGradientsAverageExactly) {
  const GradStore x = make_store({0.1, 0.2}, {0.3});
  const GradStore y = make_store({-0.3, 0.0}, {0.1});
  DpConfig dp;
  std::mt19937_64 rng(0);
  const GradStore inputs[] = {x, y};
  const GradStore out = dp_transform(inputs, dp, rng);
  const std::vector<double> want{-0.1, 0.1, 0.2};
  const auto got = out.flatten();
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(got[i], want[i], 1e-15);
}

TEST(DpTransform, ClipsGlobalNormToBound) {
  const GradStore x = make_store({1.2, 0.0}, {1.6});  // norm 2
  DpConfig dp;
  std::mt19937_64 rng(0);
  const GradStore one[] = {x};
  const GradStore out = dp_transform(one, dp, rng);
  EXPECT_NEAR(norm(out), 1.0, 1e-15);
  // Direction is kept: clipping is one scale over all blocks.
  EXPECT_NEAR(out.flatten()[0], 0.6, 1e-15);
  EXPECT_NEAR(out.flatten()[2], 0.8, 1e-15);
}

TEST(DpTransform, ClippingNeverIncreasesNorm) {
  std::mt19937_64 rng(1);
  DpConfig dp;
  dp.clip_bound = 0.7;
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_real_distribution<double> u(-2, 2);
    const GradStore x = make_store({u(rng), u(rng), u(rng)}, {u(rng)});
    const GradStore one[] = {x};
    const GradStore out = dp_transform(one, dp, rng);
    EXPECT_LE(norm(out), std::min(norm(x), 0.7) + 1e-15);
  }
}

TEST(DpTransform, NoiseStandardDeviation) {
  GradStore g;
  g.blocks.emplace("w", Tensor::zeros(Shape{100, 100}));
  DpConfig dp;
  dp.noise_multiplier = 1.0;
  std::mt19937_64 rng(2);
  const GradStore one[] = {g};
  const auto v = dp_transform(one, dp, rng).flatten();
  double mean = 0.0, sq = 0.0;
  for (double x : v) mean += x;
  mean /= v.size();
  for (double x : v) sq += (x - mean) * (x - mean);
  EXPECT_NEAR(std::sqrt(sq / v.size()), 1.0, 0.05);
}

TEST(DpTransform, NoiseScalesWithBoundOverBatch) {
  GradStore g;
  g.blocks.emplace("w", Tensor::zeros(Shape{100, 100}));
  DpConfig dp;
  dp.noise_multiplier = 2.0;
  dp.clip_bound = 0.5;
  std::mt19937_64 rng(3);
  const GradStore four[] = {g, g, g, g};
  const auto v = dp_transform(four, dp, rng).flatten();
  double sq = 0.0;
  for (double x : v) sq += x * x;
  // sigma * C / B = 0.25
  EXPECT_NEAR(std::sqrt(sq / v.size()), 0.25, 0.25 * 0.05);
}

TEST(DpTransform, DeterministicAndLinearWithoutNoise) {
  std::mt19937_64 data_rng(4);
  const GradStore x = make_store({0.1, -0.2}, {0.05});
  const GradStore y = make_store({0.3, 0.1}, {-0.2});
  DpConfig dp;
  dp.noise_multiplier = 0.3;
  std::mt19937_64 r1(9), r2(9);
  const GradStore both[] = {x, y};
  EXPECT_EQ(dp_transform(both, dp, r1).flatten(), dp_transform(both, dp, r2).flatten());

  dp.noise_multiplier = 0.0;
  std::mt19937_64 r(0);
  const GradStore xs[] = {x};
  const GradStore ys[] = {y};
  const auto mx = dp_transform(xs, dp, r).flatten();
  const auto my = dp_transform(ys, dp, r).flatten();
  const auto mxy = dp_transform(both, dp, r).flatten();
  for (std::size_t i = 0; i < mxy.size(); ++i) EXPECT_NEAR(mxy[i], 0.5 * (mx[i] + my[i]), 1e-15);
}

TEST(DpTransform, InputErrors) {
  DpConfig dp;
  std::mt19937_64 rng(0);
  EXPECT_THROW(dp_transform({}, dp, rng), InputError);
  GradStore other;
  other.blocks.emplace("a", Tensor::zeros(Shape{2}));
  const GradStore mixed[] = {make_store({1, 2}, {3}), other};
  EXPECT_THROW(dp_transform(mixed, dp, rng), InputError);
}

TEST(DefendedVictimGradients, NoClipNoNoiseEqualsVictimGradients) {
  const ParamStore p = init_params(ModelConfig::toy(), 0);
  const TokenBatch batch = TokenBatch::from_rows({{1, 2, 3, 4}, {9, 9, 8, 7}});
  const std::vector<int> labels{0, 1};
  DpConfig dp;
  dp.clip_bound = DpConfig::kNoClip;
  const auto defended = defended_victim_gradients(p, batch, labels, dp).flatten();
  const auto plain = victim_gradients(p, batch, labels).flatten();
  ASSERT_EQ(defended.size(), plain.size());
  for (std::size_t i = 0; i < plain.size(); ++i) ASSERT_NEAR(defended[i], plain[i], 1e-15);
}

TEST(DefendedVictimGradients, SeededNoise) {
  const ParamStore p = init_params(ModelConfig::toy(), 0);
  const TokenBatch batch = TokenBatch::from_rows({{1, 2, 3, 4}});
  const std::vector<int> labels{1};
  DpConfig dp;
  dp.noise_multiplier = 0.1;
  dp.seed = 3;
  const auto a = defended_victim_gradients(p, batch, labels, dp).flatten();
  const auto b = defended_victim_gradients(p, batch, labels, dp).flatten();
  dp.seed = 4;
  const auto c = defended_victim_gradients(p, batch, labels, dp).flatten();
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

}  // namespace
}  // namespace gradleak
