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

#include "posenas/arch/network.hpp"

#include <stdexcept>

#include "posenas/cost/expected_cost.hpp"
#include "posenas/cost/flops.hpp"

namespace posenas {

template <typename T>
Network<T>::Network(ArchitectureDescriptor desc, Rng& rng) : desc_(std::move(desc)) {
  desc_.validate(desc_.stride2_count());
  stem_ = build_stem<T>(desc_.stem, rng);
  int in = desc_.stem.sep_width;
  for (const auto& l : desc_.layers) {
    if (l.op.is_skip()) continue;
    blocks_.emplace_back(l.index, build_mbconv<T>({l.op.kernel, l.op.expansion, l.stride, in, l.width}, rng));
    in = l.width;
  }
  head_ = build_head<T>(in, desc_.head, rng);
}

template <typename T>
Tensor<T> Network<T>::forward(const Tensor<T>& x, HeadFeatures<T>* features) {
  Tensor<T> h = stem_->forward(x);
  for (auto& [index, block] : blocks_) h = block->forward(h);
  return head_->forward(h, features);
}

template <typename T>
Shape Network<T>::output_shape(const Shape& in) const {
  Shape s = stem_->output_shape(in);
  for (const auto& [index, block] : blocks_) s = block->output_shape(s);
  return head_->output_shape(s);
}

template <typename T>
StateDict<T> Network<T>::state() {
  StateDict<T> sd;
  stem_->collect("stem", sd);
  for (auto& [index, block] : blocks_) block->collect("layers." + std::to_string(index), sd);
  head_->collect("head", sd);
  return sd;
}

template <typename T>
std::vector<Tensor<T>> Network<T>::parameters() {
  std::vector<Tensor<T>> out;
  for (auto& p : state().parameters) out.push_back(p.tensor);
  return out;
}

template <typename T>
std::size_t Network<T>::parameter_count() {
  std::size_t n = 0;
  for (auto& p : state().parameters) n += p.tensor.numel();
  return n;
}

template <typename T>
void Network<T>::set_norm_mode(NormMode mode) {
  stem_->set_norm_mode(mode);
  for (auto& [index, block] : blocks_) block->set_norm_mode(mode);
  head_->set_norm_mode(mode);
}

template <typename T>
Network<T> assemble_network(const ArchitectureDescriptor& desc, Rng& rng) {
  return Network<T>(desc, rng);
}

ArchitectureDescriptor derive_architecture(const SupernetConfig& config,
                                           const std::vector<std::vector<OpSpec>>& ops,
                                           const std::vector<std::vector<double>>& probs,
                                           const std::vector<std::vector<double>>& costs) {
  const auto geoms = config.layers();
  if (ops.size() != geoms.size() || probs.size() != geoms.size() || costs.size() != geoms.size()) {
    throw std::invalid_argument("derive_architecture: expected " + std::to_string(geoms.size()) + " layers");
  }
  ArchitectureDescriptor d;
  d.input_h = d.input_w = config.input_size;
  d.stem = config.stem;
  d.head = config.head;
  for (std::size_t l = 0; l < geoms.size(); ++l) {
    const auto& g = geoms[l];
    if (ops[l].empty() || probs[l].size() != ops[l].size() || costs[l].size() != ops[l].size()) {
      throw std::invalid_argument("derive_architecture: candidate count mismatch at layer " + std::to_string(l));
    }
    std::size_t best = 0;
    for (std::size_t o = 1; o < ops[l].size(); ++o) {
      if (probs[l][o] > probs[l][best] || (probs[l][o] == probs[l][best] && costs[l][o] < costs[l][best])) best = o;
    }
    const OpSpec& op = ops[l][best];
    if (op.is_skip() && !g.skip_admissible()) {
      throw std::invalid_argument("derive_architecture: skip chosen at non-admissible layer " + std::to_string(l));
    }
    LayerChoice c{g.index, g.stage, op, op.is_skip() ? 0 : g.out_channels, op.is_skip() ? 1 : g.stride};
    d.layers.push_back(c);
  }
  d.validate(config.downsamplings);
  return d;
}

template <typename T>
ArchitectureDescriptor derive_architecture(const Supernet<T>& net, const SupernetConfig& config, const CostTable* table) {
  std::vector<std::vector<OpSpec>> ops;
  std::vector<std::vector<double>> probs, costs;
  for (std::size_t i = 0; i < net.num_layers(); ++i) {
    const auto& layer = net.layer(i);
    ops.push_back(layer.ops());
    const auto p = layer.probs();
    probs.emplace_back(p.values().begin(), p.values().end());
    if (table != nullptr) {
      costs.push_back(layer_costs(layer, *table));
    } else {
      std::vector<double> c;
      for (const auto& op : layer.ops()) c.push_back(static_cast<double>(flops_of(op, layer.geometry())));
      costs.push_back(std::move(c));
    }
  }
  return derive_architecture(config, ops, probs, costs);
}

template class Network<float>;
template class Network<double>;
template Network<float> assemble_network<float>(const ArchitectureDescriptor&, Rng&);
template Network<double> assemble_network<double>(const ArchitectureDescriptor&, Rng&);
template ArchitectureDescriptor derive_architecture<float>(const Supernet<float>&, const SupernetConfig&, const CostTable*);
template ArchitectureDescriptor derive_architecture<double>(const Supernet<double>&, const SupernetConfig&, const CostTable*);

}  // namespace posenas
