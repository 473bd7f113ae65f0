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

#include <cstdint>

#include "posenas/cost/cost_table.hpp"
#include "posenas/supernet/op_spec.hpp"
#include "posenas/supernet/supernet.hpp"

namespace posenas {

struct LatencyOptions {
  int batch = 32;
  int warmup = 5;
  int reps = 30;  // >= 3
  std::uint64_t seed = 0;
};

/// Median wall time in microseconds of `reps` forward passes of `op` (float,
/// no tape) at the geometry's input, after `warmup` untimed passes. Skip is
/// timed as a copy of its input.
double bench_latency(const OpSpec& op, const LayerGeometry& geometry, const LatencyOptions& opts = {});

/// MFLOPs per (layer, candidate) with stem + head as fixed_cost.
CostTable flops_table(const SupernetConfig& config);
/// Microseconds per (layer, candidate); stem and head are timed once each.
CostTable latency_table(const SupernetConfig& config, const LatencyOptions& opts = {});

/// (layer index, candidate list) pairs of the space, skip last where admissible.
std::vector<std::pair<int, std::vector<OpSpec>>> layer_candidates(const SupernetConfig& config);

}  // namespace posenas
