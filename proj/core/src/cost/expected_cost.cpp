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

#include "posenas/cost/expected_cost.hpp"

#include <cmath>
#include <stdexcept>

#include "posenas/autograd/ops.hpp"

namespace posenas {

void RegularizerConfig::validate() const {
  if (!(lambda >= 0) || !std::isfinite(lambda)) throw std::invalid_argument("regularizer: lambda must be finite and >= 0");
  if (!(tau > 1) || !std::isfinite(tau)) throw std::invalid_argument("regularizer: tau must be finite and > 1");
}

template <typename T>
Tensor<T> expected_layer_cost(const Tensor<T>& probs, std::span<const double> costs) {
  if (probs.rank() != 1 || probs.numel() != costs.size()) {
    throw std::invalid_argument("expected_layer_cost: " + std::to_string(costs.size()) + " costs for probabilities of shape " +
                                shape_str(probs.shape()));
  }
  std::vector<T> c(costs.begin(), costs.end());
  return sum(mul(probs, Tensor<T>(probs.shape(), std::move(c), false)));
}

template <typename T>
std::vector<double> layer_costs(const MixedLayer<T>& layer, const CostTable& table) {
  std::vector<double> out;
  out.reserve(layer.ops().size());
  for (const auto& op : layer.ops()) out.push_back(table.at(layer.geometry().index, op));
  return out;
}

template <typename T>
void check_table_covers(const Supernet<T>& net, const CostTable& table) {
  for (std::size_t i = 0; i < net.num_layers(); ++i) layer_costs(net.layer(i), table);
}

template <typename T>
Tensor<T> expected_total_cost(const Supernet<T>& net, const CostTable& table) {
  Tensor<T> total = Tensor<T>::scalar(static_cast<T>(table.fixed_cost()));
  for (std::size_t i = 0; i < net.num_layers(); ++i) {
    const auto& layer = net.layer(i);
    const auto costs = layer_costs(layer, table);
    total = add(total, expected_layer_cost(layer.probs(), costs));
  }
  return total;
}

template <typename T>
Tensor<T> cost_regularizer(const Tensor<T>& cost, const RegularizerConfig& cfg) {
  cfg.validate();
  if (cost.numel() != 1) throw std::invalid_argument("cost_regularizer: cost must be a scalar");
  if (!(cost[0] > 0)) throw std::domain_error("cost_regularizer: cost must be > 0");
  return scale(log(cost), static_cast<T>(cfg.lambda / std::log(cfg.tau)));
}

#define POSENAS_INSTANTIATE(T)                                                                     \
  template Tensor<T> expected_layer_cost<T>(const Tensor<T>&, std::span<const double>);           \
  template std::vector<double> layer_costs<T>(const MixedLayer<T>&, const CostTable&);            \
  template Tensor<T> expected_total_cost<T>(const Supernet<T>&, const CostTable&);                \
  template void check_table_covers<T>(const Supernet<T>&, const CostTable&);                      \
  template Tensor<T> cost_regularizer<T>(const Tensor<T>&, const RegularizerConfig&);

POSENAS_INSTANTIATE(float)
POSENAS_INSTANTIATE(double)

}  // namespace posenas
