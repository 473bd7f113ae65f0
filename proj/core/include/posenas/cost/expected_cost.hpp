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

#include <span>
#include <vector>

#include "posenas/autograd/tensor.hpp"
#include "posenas/cost/cost_table.hpp"
#include "posenas/supernet/supernet.hpp"

namespace posenas {

/// lambda * log_tau(cost).
struct RegularizerConfig {
  double lambda = 0.1;
  double tau = 10.0;

  /// lambda >= 0, tau > 1.
  void validate() const;
};

/// sum_o p_o * cost_o; differentiable through p.
template <typename T>
Tensor<T> expected_layer_cost(const Tensor<T>& probs, std::span<const double> costs);

/// Costs of the layer's candidates in candidate order.
template <typename T>
std::vector<double> layer_costs(const MixedLayer<T>& layer, const CostTable& table);

/// fixed_cost + sum over layers of the expected layer cost.
template <typename T>
Tensor<T> expected_total_cost(const Supernet<T>& net, const CostTable& table);

/// Throws std::out_of_range naming the first missing (layer, op).
template <typename T>
void check_table_covers(const Supernet<T>& net, const CostTable& table);

/// Throws std::domain_error for cost <= 0.
template <typename T>
Tensor<T> cost_regularizer(const Tensor<T>& cost, const RegularizerConfig& cfg);

}  // namespace posenas
