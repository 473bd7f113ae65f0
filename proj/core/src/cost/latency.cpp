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

#include "posenas/cost/latency.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <stdexcept>
#include <thread>

#include "posenas/cost/flops.hpp"

namespace posenas {
namespace {

template <typename F>
double median_us(F&& run, int warmup, int reps) {
  if (reps < 3) throw std::invalid_argument("bench_latency: reps must be >= 3");
  if (warmup < 0) throw std::invalid_argument("bench_latency: warmup must be >= 0");
  for (int i = 0; i < warmup; ++i) run();
  std::vector<double> t;
  t.reserve(static_cast<std::size_t>(reps));
  for (int i = 0; i < reps; ++i) {
    const auto a = std::chrono::steady_clock::now();
    run();
    const auto b = std::chrono::steady_clock::now();
    t.push_back(std::chrono::duration<double, std::micro>(b - a).count());
  }
  std::nth_element(t.begin(), t.begin() + reps / 2, t.end());
  // A timer tick below resolution would read as zero.
  return std::max(t[static_cast<std::size_t>(reps / 2)], 1e-3);
}

Tensor<float> random_input(const Shape& shape, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<float> d(-1.f, 1.f);
  std::vector<float> v(shape_numel(shape));
  for (auto& x : v) x = d(rng);
  return Tensor<float>(shape, std::move(v), false);
}

double time_module(Module<float>& m, const Shape& in, const LatencyOptions& opts) {
  m.set_norm_mode(NormMode::kRunningStats);
  const auto x = random_input(in, opts.seed + 1);
  return median_us([&] { m.forward(x); }, opts.warmup, opts.reps);
}

Shape batched(int batch, int c, int h) {
  if (batch < 1) throw std::invalid_argument("bench_latency: batch must be >= 1");
  return {static_cast<std::size_t>(batch), static_cast<std::size_t>(c), static_cast<std::size_t>(h),
          static_cast<std::size_t>(h)};
}

}  // namespace

double bench_latency(const OpSpec& op, const LayerGeometry& g, const LatencyOptions& opts) {
  const Shape in = batched(opts.batch, g.in_channels, g.in_size);
  if (op.is_skip()) {
    if (!g.skip_admissible()) throw std::invalid_argument("bench_latency: skip is not admissible at layer " + std::to_string(g.index));
    const auto x = random_input(in, opts.seed + 1);
    return median_us([&] { Tensor<float> y(x.shape(), std::vector<float>(x.values().begin(), x.values().end()), false); }, opts.warmup, opts.reps);
  }
  Rng rng(opts.seed);
  auto block = build_mbconv<float>(g.mbconv(op), rng);
  return time_module(*block, in, opts);
}

std::vector<std::pair<int, std::vector<OpSpec>>> layer_candidates(const SupernetConfig& config) {
  std::vector<std::pair<int, std::vector<OpSpec>>> out;
  for (const auto& g : config.layers()) {
    auto ops = config.candidates;
    if (config.allow_skip && g.skip_admissible()) ops.push_back(OpSpec::skip());
    out.emplace_back(g.index, std::move(ops));
  }
  return out;
}

CostTable flops_table(const SupernetConfig& config) {
  config.validate();
  CostTable t(Benchmark::kFlops, "MFLOPs");
  t.set_meta("counting", "macs");
  t.set_meta("input", std::to_string(config.input_size));
  const auto n = static_cast<std::size_t>(config.input_size);
  const Macs stem = stem_flops(config.stem, {static_cast<std::size_t>(config.stem.input_channels), n, n});
  const auto hs = static_cast<std::size_t>(config.head_input_size());
  const Macs head = head_flops(config.head, {static_cast<std::size_t>(config.head_input_channels()), hs, hs});
  t.set_fixed_cost(to_mflops(stem + head));
  const auto geoms = config.layers();
  for (const auto& [index, ops] : layer_candidates(config)) {
    for (const auto& op : ops) t.set(index, op, to_mflops(flops_of(op, geoms[static_cast<std::size_t>(index)])));
  }
  return t;
}

CostTable latency_table(const SupernetConfig& config, const LatencyOptions& opts) {
  config.validate();
  CostTable t(Benchmark::kLatency, "us");
  t.set_meta("host_threads", std::to_string(std::thread::hardware_concurrency()));
  t.set_meta("batch", std::to_string(opts.batch));
  t.set_meta("protocol", "median of " + std::to_string(opts.reps) + " after " + std::to_string(opts.warmup) + " warmup");
  t.set_meta("input", std::to_string(config.input_size));
  Rng rng(opts.seed);
  auto stem = build_stem<float>(config.stem, rng);
  const double stem_us = time_module(*stem, batched(opts.batch, config.stem.input_channels, config.input_size), opts);
  auto head = build_head<float>(config.head_input_channels(), config.head, rng);
  const double head_us = time_module(*head, batched(opts.batch, config.head_input_channels(), config.head_input_size()), opts);
  t.set_fixed_cost(stem_us + head_us);
  const auto geoms = config.layers();
  for (const auto& [index, ops] : layer_candidates(config)) {
    for (const auto& op : ops) t.set(index, op, bench_latency(op, geoms[static_cast<std::size_t>(index)], opts));
  }
  return t;
}

}  // namespace posenas
