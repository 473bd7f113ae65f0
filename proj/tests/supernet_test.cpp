// Copyright 2026 The posenas Authors.
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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "posenas/autograd/grad_check.hpp"
#include "posenas/autograd/ops.hpp"
#include "posenas/supernet/supernet.hpp"

namespace posenas {
namespace {

using testing::random_tensor;

Tensor<double> alpha_of(std::vector<double> v) {
  const std::size_t n = v.size();
  return Tensor<double>(Shape{n}, std::move(v));
}

TEST(LayerProbsTest, Examples) {
  const auto uniform = layer_probs(alpha_of(std::vector<double>(7, 0.0)));
  for (double p : uniform.values()) EXPECT_NEAR(p, 1.0 / 7.0, 1e-15);
  const auto p = layer_probs(alpha_of({std::log(3.0), 0.0}));
  EXPECT_NEAR(p[0], 0.75, 1e-12);
  EXPECT_NEAR(p[1], 0.25, 1e-12);
  const auto big = layer_probs(alpha_of({1000.0, 0.0}));
  EXPECT_NEAR(big[0], 1.0, 1e-12);
  EXPECT_GE(big[1], 0.0);
  EXPECT_LT(big[1], 1e-300);
  EXPECT_THROW(layer_probs(alpha_of({0.0, NAN})), std::invalid_argument);
}

TEST(LayerProbsTest, NormalisedAndShiftInvariant) {
  for (int trial = 0; trial < 20; ++trial) {
    auto a = random_tensor({6}, 300 + trial, false, -5, 5);
    const auto p = layer_probs(a);
    double s = 0;
    for (double v : p.values()) {
      EXPECT_GT(v, 0.0);
      s += v;
    }
    EXPECT_NEAR(s, 1.0, 1e-6);
    auto shifted = a.detached();
    for (auto& v : shifted.values()) v += 17.25;
    const auto q = layer_probs(shifted);
    for (std::size_t i = 0; i < p.numel(); ++i) EXPECT_NEAR(p[i], q[i], 1e-6);
  }
}

LayerGeometry geometry(int c, int stride = 1, int size = 6) { return {0, 1, c, c, stride, size}; }

std::unique_ptr<MixedLayer<double>> two_identities() {
  std::vector<ModulePtr<double>> c;
  c.push_back(std::make_unique<Identity<double>>());
  c.push_back(std::make_unique<Identity<double>>());
  return std::make_unique<MixedLayer<double>>(geometry(2), std::vector<OpSpec>{OpSpec::skip(), OpSpec::skip()},
                                              std::move(c));
}

TEST(MixedLayerTest, EqualCandidatesGiveInput) {
  auto layer = two_identities();
  layer->alpha()[0] = 2.3;
  layer->alpha()[1] = -0.7;
  auto x = random_tensor({1, 2, 3, 3}, 31, false);
  const auto y = layer->forward(x);
  for (std::size_t i = 0; i < x.numel(); ++i) EXPECT_NEAR(y[i], x[i], 1e-12);
}

TEST(MixedLayerTest, OneHotSelectsCandidate) {
  Rng rng(1);
  auto layer = MixedLayer<double>::build(geometry(4), mbconv_grid({3, 5}, {3}), true, rng);
  ASSERT_EQ(layer->size(), 3u);
  auto x = random_tensor({2, 4, 6, 6}, 32, false);
  for (std::size_t pick = 0; pick < layer->size(); ++pick) {
    for (std::size_t i = 0; i < layer->size(); ++i) layer->alpha()[i] = i == pick ? 40.0 : -40.0;
    const auto y = layer->forward(x);
    const auto ref = layer->candidate(pick).forward(x);
    for (std::size_t i = 0; i < y.numel(); ++i) ASSERT_NEAR(y[i], ref[i], 1e-5);
  }
}

TEST(MixedLayerTest, SkipPlusZeroPointwiseHalvesInput) {
  Rng rng(2);
  std::vector<ModulePtr<double>> c;
  c.push_back(std::make_unique<Identity<double>>());
  auto pw = std::make_unique<ConvNorm<double>>(ConvSpec::pointwise(2, 2), false, rng);
  for (auto& v : pw->conv().weight().values()) v = 0;
  for (auto& v : pw->norm().beta().values()) v = 0.3;
  c.push_back(std::move(pw));
  MixedLayer<double> layer(geometry(2), {OpSpec::skip(), OpSpec::mbconv(3, 3)}, std::move(c));
  auto x = random_tensor({2, 2, 3, 3}, 33, false);
  const auto y = layer.forward(x);
  for (std::size_t i = 0; i < x.numel(); ++i) EXPECT_NEAR(y[i], 0.5 * x[i] + 0.5 * 0.3, 1e-12);
}

TEST(MixedLayerTest, AlphaGradientMatchesFiniteDifferences) {
  Rng rng(3);
  auto layer = MixedLayer<double>::build(geometry(2), {OpSpec::mbconv(3, 3), OpSpec::mbconv(7, 3)}, false, rng);
  layer->alpha()[0] = 0.4;
  layer->alpha()[1] = -0.2;
  auto x = random_tensor({2, 2, 5, 5}, 34, false);
  auto target = random_tensor({2, 2, 5, 5}, 35, false);
  EXPECT_LT(grad_check_param([&] { return mse(layer->forward(x), target); }, layer->alpha()), 1e-4);
}

TEST(MixedLayerTest, SkipOnlyWhereAdmissible) {
  Rng rng(4);
  const auto ops = mbconv_grid({3, 5, 7}, {3, 6});
  EXPECT_EQ(MixedLayer<float>::build({0, 1, 4, 4, 1, 8}, ops, true, rng)->size(), 7u);
  EXPECT_EQ(MixedLayer<float>::build({0, 1, 4, 4, 2, 8}, ops, true, rng)->size(), 6u);
  EXPECT_EQ(MixedLayer<float>::build({0, 1, 4, 6, 1, 8}, ops, true, rng)->size(), 6u);
  EXPECT_EQ(MixedLayer<float>::build({0, 1, 4, 4, 1, 8}, ops, false, rng)->size(), 6u);
  const auto layer = MixedLayer<float>::build({0, 1, 4, 4, 1, 8}, ops, true, rng);
  EXPECT_EQ(layer->alpha().numel(), layer->size());
  for (float a : layer->alpha().values()) EXPECT_EQ(a, 0.0f);
}

TEST(DropPathTest, ZeroRateKeepsEverything) {
  Rng rng(5);
  auto layer = MixedLayer<double>::build(geometry(2), mbconv_grid({3, 5, 7}, {3}), true, rng);
  layer->alpha()[1] = 1.0;
  const auto s = drop_path(*layer, 0.0, rng);
  const auto p = layer->probs();
  for (std::size_t i = 0; i < layer->size(); ++i) {
    EXPECT_TRUE(s.active[i]);
    EXPECT_NEAR(s.probs[i], p[i], 1e-12);
  }
  EXPECT_THROW(drop_path(*layer, 1.0, rng), std::invalid_argument);
  EXPECT_THROW(drop_path(*layer, -0.1, rng), std::invalid_argument);
}

TEST(DropPathTest, RenormalisedAndDeterministic) {
  Rng build_rng(6);
  auto layer = MixedLayer<double>::build(geometry(2), mbconv_grid({3, 5, 7}, {3, 6}), true, build_rng);
  for (std::size_t i = 0; i < layer->size(); ++i) layer->alpha()[i] = 0.1 * static_cast<double>(i);
  Rng a(99), b(99);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = drop_path(*layer, 0.6, a);
    const auto t = drop_path(*layer, 0.6, b);
    EXPECT_EQ(s.active, t.active);
    EXPECT_EQ(s.probs, t.probs);
    EXPECT_TRUE(std::any_of(s.active.begin(), s.active.end(), [](bool v) { return v; }));
    EXPECT_NEAR(std::accumulate(s.probs.begin(), s.probs.end(), 0.0), 1.0, 1e-6);
    for (std::size_t i = 0; i < s.active.size(); ++i) {
      if (!s.active[i]) EXPECT_EQ(s.probs[i], 0.0);
    }
  }
}

TEST(SupernetConfigTest, SmallLayout) {
  const auto c = SupernetConfig::small();
  const auto layers = c.layers();
  ASSERT_EQ(c.stages[0].width, 24);
  EXPECT_EQ(layers[0].stride, 2);
  EXPECT_EQ(layers[0].out_channels, 24);
  for (int i = 1; i <= 3; ++i) {
    EXPECT_EQ(layers[static_cast<std::size_t>(i)].stride, 1);
    EXPECT_EQ(layers[static_cast<std::size_t>(i)].out_channels, 24);
    EXPECT_EQ(layers[static_cast<std::size_t>(i)].stage, 1);
  }
  EXPECT_EQ(layers[4].stage, 2);
  // stage 3 output: 256 / 2 (stem) / 2 / 2 / 2
  for (const auto& g : layers) {
    if (g.stage == 3) EXPECT_EQ(g.out_size(), 16);
  }
  EXPECT_EQ(c.head_input_size(), 16);
  EXPECT_EQ(c.head_input_channels(), 96);
}

TEST(SupernetConfigTest, DeskScaling) {
  const auto c = SupernetConfig::desk();
  EXPECT_EQ(c.input_size, 64);
  EXPECT_EQ(c.stages[0].width, 6);
  EXPECT_EQ(c.stages[0].layers, 2);
  const auto layers = c.layers();
  EXPECT_EQ(layers.size(), 8u);
  EXPECT_EQ(c.head_input_size(), 4);
  int downs = 1;
  int prev = 0;
  for (const auto& s : c.stages) {
    downs += s.first_stride == 2 ? 1 : 0;
    EXPECT_GE(s.width, prev);
    prev = s.width;
  }
  EXPECT_EQ(downs, 4);
}

TEST(SupernetConfigTest, RejectsBrokenLayouts) {
  auto c = SupernetConfig::desk();
  c.stages[3].first_stride = 2;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = SupernetConfig::desk();
  c.stages[2].width = 4;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = SupernetConfig::desk();
  c.candidates.clear();
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(SupernetTest, DeskForwardShapes) {
  const auto c = SupernetConfig::desk();
  Rng rng(7);
  auto net = build_supernet<float>(c, rng);
  ASSERT_EQ(net.num_layers(), c.layers().size());
  Tensor<float> x({2, 3, 64, 64});
  Tensor<float> h = net.stem().forward(x);
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    const auto& g = net.layer(l).geometry();
    h = net.layer(l).forward(h);
    EXPECT_EQ(h.shape(), (Shape{2, static_cast<std::size_t>(g.out_channels), static_cast<std::size_t>(g.out_size()),
                                static_cast<std::size_t>(g.out_size())}));
    const bool has_skip = std::any_of(net.layer(l).ops().begin(), net.layer(l).ops().end(),
                                      [](const OpSpec& o) { return o.is_skip(); });
    EXPECT_EQ(has_skip, g.skip_admissible());
  }
  EXPECT_EQ(h.shape(), (Shape{2, static_cast<std::size_t>(c.head_input_channels()),
                              static_cast<std::size_t>(c.head_input_size()),
                              static_cast<std::size_t>(c.head_input_size())}));
  EXPECT_EQ(net.forward(x).shape(), (Shape{2, 8, 16, 16}));
  EXPECT_EQ(net.output_shape({2, 3, 64, 64}), (Shape{2, 8, 16, 16}));
}

TEST(SupernetTest, ParameterGroupsAreDisjoint) {
  Rng rng(8);
  auto net = build_supernet<float>(SupernetConfig::desk(), rng);
  const auto arch = net.arch_parameters();
  EXPECT_EQ(arch.size(), net.num_layers());
  for (const auto& w : net.weight_parameters()) {
    for (const auto& a : arch) EXPECT_FALSE(w.shares_storage_with(a));
  }
}

TEST(SupernetTest, SampledForwardUsesSurvivorsOnly) {
  Rng rng(9);
  auto layer = MixedLayer<double>::build(geometry(2), mbconv_grid({3, 5}, {3}), true, rng);
  auto x = random_tensor({1, 2, 4, 4}, 36, false);
  PathSample only_skip{{false, false, true}, {0.0, 0.0, 1.0}};
  const auto y = layer->forward(x, only_skip);
  for (std::size_t i = 0; i < x.numel(); ++i) EXPECT_EQ(y[i], x[i]);
}

}  // namespace
}  // namespace posenas
