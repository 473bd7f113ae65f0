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

#include <string>
#include <vector>

#include "posenas/arch/descriptor.hpp"
#include "posenas/cost/cost_table.hpp"
#include "posenas/pose/config.hpp"
#include "posenas/pose/dataset.hpp"
#include "posenas/search/search.hpp"

namespace posenas {

/// What `derive` needs from a finished search: the config it ran with, the
/// per-layer candidates, their alpha values and table costs.
struct SearchState {
  Config config;
  std::vector<std::vector<OpSpec>> ops;
  std::vector<std::vector<double>> alpha;
  std::vector<std::vector<double>> costs;
  double tau = 0;

  std::vector<std::vector<double>> probs() const;
  /// JSON object with keys config, tau, layers.
  std::string to_json() const;
  /// Throws std::runtime_error on malformed or inconsistent input.
  static SearchState parse(const std::string& json);
};

/// fixed_cost + sum over layers of the mean candidate cost.
double uniform_expected_cost(const SupernetConfig& config, const CostTable& table);

/// The configured regularizer, with tau <= 0 replaced by the uniform expected
/// cost.
RegularizerConfig resolve_regularizer(const PipelineConfig& config, const CostTable& table);

struct SearchOutcome {
  SearchState state;
  SearchTrace trace;
  ArchitectureDescriptor arch;
};

/// Builds the supernet from `config`, runs warmup + joint search on `train`
/// (32-bit) and derives the architecture.
SearchOutcome search_architecture(const Config& config, const std::vector<KeypointSample>& train,
                                  const CostTable& table);

ArchitectureDescriptor derive_from_state(const SearchState& state);

/// Samples `random_samples` architectures, trains each for `random_epochs`
/// on the train split of `train` and scores it by PCK on the val split.
RandomSearchResult random_search(const PipelineConfig& config, const std::vector<KeypointSample>& train);

}  // namespace posenas
