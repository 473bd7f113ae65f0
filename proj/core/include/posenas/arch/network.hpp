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

#include <memory>
#include <vector>

#include "posenas/arch/descriptor.hpp"
#include "posenas/arch/head.hpp"
#include "posenas/cost/cost_table.hpp"
#include "posenas/nn/module.hpp"
#include "posenas/supernet/supernet.hpp"

namespace posenas {

/// A discrete pose network: stem -> surviving MBConv layers -> head.
template <typename T>
class Network {
 public:
  Network(ArchitectureDescriptor desc, Rng& rng);

  Tensor<T> forward(const Tensor<T>& x, HeadFeatures<T>* features = nullptr);
  Shape output_shape(const Shape& in) const;

  /// Parameter names: "stem.*", "layers.<descriptor index>.*", "head.*".
  StateDict<T> state();
  std::vector<Tensor<T>> parameters();
  std::size_t parameter_count();
  void set_norm_mode(NormMode mode);

  const ArchitectureDescriptor& descriptor() const { return desc_; }
  std::size_t num_blocks() const { return blocks_.size(); }
  Head<T>& head() { return *head_; }

 private:
  ArchitectureDescriptor desc_;
  std::unique_ptr<Sequential<T>> stem_;
  std::vector<std::pair<int, ModulePtr<T>>> blocks_;
  std::unique_ptr<Head<T>> head_;
};

template <typename T>
Network<T> assemble_network(const ArchitectureDescriptor& desc, Rng& rng);

/// Per-layer argmax of `probs`. Exact ties go to the lower cost, then the
/// lower index. `ops`, `probs` and `costs` are indexed [layer][candidate].
ArchitectureDescriptor derive_architecture(const SupernetConfig& config,
                                           const std::vector<std::vector<OpSpec>>& ops,
                                           const std::vector<std::vector<double>>& probs,
                                           const std::vector<std::vector<double>>& costs);

/// Derives from the supernet's current alpha. Costs come from `table` when
/// given, analytic MACs otherwise.
template <typename T>
ArchitectureDescriptor derive_architecture(const Supernet<T>& net, const SupernetConfig& config,
                                           const CostTable* table = nullptr);

extern template class Network<float>;
extern template class Network<double>;

}  // namespace posenas
