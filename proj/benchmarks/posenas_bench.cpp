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


#include <benchmark/benchmark.h>

#include <random>

#include "posenas/arch/network.hpp"
#include "posenas/autograd/ops.hpp"
#include "posenas/autograd/tape.hpp"
#include "posenas/nn/blocks.hpp"
#include "posenas/nn/conv.hpp"
#include "posenas/supernet/supernet.hpp"

namespace posenas {
namespace {

Tensor<float> noise(const Shape& shape, std::uint64_t seed) {
  Tensor<float> t(shape);
  std::mt19937_64 gen(seed);
  std::normal_distribution<float> n;
  for (auto& v : t.values()) v = n(gen);
  return t;
}

void BM_Conv3x3(benchmark::State& state) {
  const int c = static_cast<int>(state.range(0));
  const auto x = noise({8, static_cast<std::size_t>(c), 32, 32}, 1);
  const auto w = noise({static_cast<std::size_t>(c), static_cast<std::size_t>(c), 3, 3}, 2);
  for (auto _ : state) benchmark::DoNotOptimize(conv2d(x, w, 1, 1));
  state.SetItemsProcessed(state.iterations() * 8 * c * c * 9 * 32 * 32);
}
BENCHMARK(BM_Conv3x3)->Arg(8)->Arg(32);

void BM_Depthwise(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const auto x = noise({8, 48, 32, 32}, 1);
  const auto w = noise({48, 1, static_cast<std::size_t>(k), static_cast<std::size_t>(k)}, 2);
  for (auto _ : state) benchmark::DoNotOptimize(depthwise_conv2d(x, w, 1, k / 2));
  state.SetItemsProcessed(state.iterations() * 8 * 48 * k * k * 32 * 32);
}
BENCHMARK(BM_Depthwise)->Arg(3)->Arg(5)->Arg(7);

void BM_Pointwise(benchmark::State& state) {
  const auto x = noise({8, 16, 32, 32}, 1);
  const auto w = noise({96, 16, 1, 1}, 2);
  for (auto _ : state) benchmark::DoNotOptimize(pointwise_conv2d(x, w));
}
BENCHMARK(BM_Pointwise);

void BM_ConvTranspose(benchmark::State& state) {
  const auto x = noise({8, 32, 8, 8}, 1);
  const auto w = noise({32, 16, 4, 4}, 2);
  for (auto _ : state) benchmark::DoNotOptimize(conv_transpose2d(x, w, 2, 1));
}
BENCHMARK(BM_ConvTranspose);

void BM_MBConvForward(benchmark::State& state) {
  Rng rng(3);
  MBConv<float> block({static_cast<int>(state.range(0)), 6, 1, 16, 16}, rng);
  const auto x = noise({8, 16, 16, 16}, 4);
  for (auto _ : state) benchmark::DoNotOptimize(block.forward(x));
}
BENCHMARK(BM_MBConvForward)->Arg(3)->Arg(7);

void BM_MBConvBackward(benchmark::State& state) {
  Rng rng(3);
  MBConv<float> block({5, 6, 1, 16, 16}, rng);
  const auto x = noise({8, 16, 16, 16}, 4);
  for (auto _ : state) {
    Tape<float> tape;
    Tensor<float> loss;
    {
      TapeScope<float> scope(tape);
      loss = sum(block.forward(x));
    }
    tape.backward(loss);
  }
}
BENCHMARK(BM_MBConvBackward);

void BM_SupernetForward(benchmark::State& state) {
  Rng rng(5);
  auto net = build_supernet<float>(SupernetConfig::desk(), rng);
  const auto x = noise({static_cast<std::size_t>(state.range(0)), 3, 64, 64}, 6);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(x));
}
BENCHMARK(BM_SupernetForward)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace posenas

BENCHMARK_MAIN();
