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

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "posenas/cost/cost_table.hpp"
#include "posenas/cost/flops.hpp"
#include "posenas/search/data.hpp"
#include "posenas/search/search.hpp"
#include "posenas/supernet/supernet.hpp"

// Receptive-field toy: the target is the (blurred noise) input plus a copy
// shifted `shift` pixels to the right, upsampled 2x. With one searchable
// layer at half resolution, only the 7x7 candidate sees far enough for the
// shifted copy; the local term keeps early features alive.
namespace posenas::testing {

struct ToyTask {
  int size = 32;
  int shift = 9;
};

inline SupernetConfig toy_space(const ToyTask& t = {}) {
  SupernetConfig c;
  c.input_size = t.size;
  c.stem = {1, 8, 8};
  c.stages = {{8, 1, 1}};
  c.candidates = {OpSpec::mbconv(3, 3), OpSpec::mbconv(7, 6)};
  c.allow_skip = false;
  c.downsamplings = 1;
  c.head = {8, 8, false, HeadStyle::kPlain, 1, 4};
  return c;
}

inline TensorDataset toy_dataset(int n, std::uint64_t seed, const ToyTask& t = {}) {
  TensorDataset d;
  const auto s = static_cast<std::size_t>(t.size);
  d.input_shape = {1, s, s};
  d.target_shape = {1, 2 * s, 2 * s};
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  for (int i = 0; i < n; ++i) {
    std::vector<float> noise(s * s), in(s * s, 0.0f), out(4 * s * s, 0.0f);
    for (auto& v : noise) v = u(gen);
    // 3x3 box blur keeps neighbouring pixels correlated
    for (int y = 0; y < t.size; ++y) {
      for (int x = 0; x < t.size; ++x) {
        float acc = 0;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int yy = y + dy, xx = x + dx;
            if (yy >= 0 && yy < t.size && xx >= 0 && xx < t.size) acc += noise[static_cast<std::size_t>(yy * t.size + xx)];
          }
        }
        in[static_cast<std::size_t>(y * t.size + x)] = acc / 3.0f;
      }
    }
    for (int v = 0; v < 2 * t.size; ++v) {
      for (int x2 = 0; x2 < 2 * t.size; ++x2) {
        const std::size_t row = static_cast<std::size_t>((v / 2) * t.size);
        float acc = in[row + static_cast<std::size_t>(x2 / 2)];
        const int src = x2 / 2 - t.shift;
        if (src >= 0) acc += in[row + static_cast<std::size_t>(src)];
        out[static_cast<std::size_t>(v * 2 * t.size + x2)] = acc;
      }
    }
    d.add(std::move(in), std::move(out));
  }
  return d;
}

/// Search settings under which the 7x7 path leaves the zero-output plateau
/// before the cosine schedule has decayed.
inline SearchSchedule toy_schedule(std::uint64_t seed) {
  SearchSchedule s;
  s.warmup_epochs = 10;
  s.joint_epochs = 20;
  s.batch_size = 16;
  s.weight.lr = 0.2;
  s.arch.lr = 3e-3;
  s.seed = seed;
  return s;
}

inline CostTable toy_table(const SupernetConfig& c) {
  CostTable t(Benchmark::kFlops, "MFLOPs");
  for (const auto& g : c.layers()) {
    for (const auto& op : c.candidates) t.set(g.index, op, to_mflops(flops_of(op, g)));
  }
  t.set_fixed_cost(1.0);
  return t;
}

}  // namespace posenas::testing
