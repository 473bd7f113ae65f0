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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "posenas/arch/descriptor.hpp"
#include "posenas/cost/cost_table.hpp"
#include "posenas/cost/expected_cost.hpp"
#include "posenas/search/data.hpp"
#include "posenas/search/optim.hpp"
#include "posenas/supernet/supernet.hpp"

namespace posenas {

struct SearchSchedule {
  int warmup_epochs = 5;
  int joint_epochs = 15;
  int batch_size = 32;
  SgdConfig weight;  // cosine-annealed over all warmup + joint weight steps
  AdamConfig arch;   // constant learning rate
  double drop_rate = 0.2;
  double grad_clip = 5.0;  // weight-gradient L2 norm cap, <= 0 disables
  std::uint64_t seed = 0;

  /// 60 warmup + 150 joint epochs.
  static SearchSchedule full();
  void validate() const;
};

/// MSE over heatmaps plus lambda * log_tau(expected cost).
template <typename T>
Tensor<T> total_loss(const Tensor<T>& pred, const Tensor<T>& target, const Supernet<T>& net, const CostTable& table,
                     const RegularizerConfig& reg);

struct TraceRecord {
  int epoch = 0;
  char phase = 'w';  // 'w' weights, 'a' architecture
  double loss = 0;
  double mse = 0;
  double cost = 0;
};

struct ProbSnapshot {
  int epoch = 0;
  std::vector<std::vector<double>> probs;  // [layer][candidate]
};

struct SearchTrace {
  std::vector<TraceRecord> records;
  std::vector<ProbSnapshot> snapshots;

  /// "epoch <n> phase <w|a> loss <v> mse <v> cost <v>" lines; each joint
  /// epoch is followed by "probs <layer> <p0> <p1> ..." lines.
  std::string to_text() const;
};

/// Bilevel search over one supernet. Weight epochs run SGD with drop-path on
/// the train split, stepping on the per-pixel mean of the loss. Architecture
/// epochs run Adam on alpha over the val split, with the full mixture and
/// frozen normalisation statistics.
template <typename T>
class SearchEngine {
 public:
  /// Throws std::out_of_range before any training when `table` misses a
  /// candidate of `net`.
  SearchEngine(Supernet<T>& net, const TensorDataset& data, SplitDataset split, const CostTable& table,
               SearchSchedule schedule, RegularizerConfig reg);
  SearchEngine(Supernet<T>&, TensorDataset&&, SplitDataset, const CostTable&, SearchSchedule,
               RegularizerConfig) = delete;

  /// Runs the warmup epochs (weights only; alpha untouched).
  void warmup_weights();
  /// Runs the joint epochs, alternating a weight pass and an alpha pass.
  void joint_search();
  /// One pass of each phase, unrecorded; for callers driving their own loop.
  TraceRecord weight_epoch();
  TraceRecord arch_epoch();
  const SearchTrace& trace() const { return trace_; }
  long weight_steps_taken() const { return weight_step_; }
  long total_weight_steps() const { return total_weight_steps_; }

 private:
  double expected_cost_value() const;
  std::uint64_t next_seed();

  Supernet<T>& net_;
  const TensorDataset& data_;
  SplitDataset split_;
  CostTable table_;
  SearchSchedule schedule_;
  RegularizerConfig reg_;
  Sgd<T> weights_;
  Adam<T> arch_;
  Rng rng_;
  long weight_step_ = 0;
  long total_weight_steps_ = 0;
  int epoch_ = 0;
  int warmup_done_ = 0;
  SearchTrace trace_;
};

/// Warmup then joint search; returns the trace.
template <typename T>
SearchTrace run_search(Supernet<T>& net, const TensorDataset& data, const SplitDataset& split, const CostTable& table,
                       const SearchSchedule& schedule, const RegularizerConfig& reg);

/// Uniform per-layer choice over the candidates, skip included where
/// admissible and allowed.
ArchitectureDescriptor sample_architecture(const SupernetConfig& space, Rng& rng);

struct RandomSearchResult {
  std::vector<ArchitectureDescriptor> samples;
  std::vector<double> scores;
  std::size_t best = 0;

  const ArchitectureDescriptor& best_architecture() const { return samples.at(best); }
};

/// Scores one sampled architecture (e.g. trains it briefly and returns val
/// PCK). `index` is the sample's position, for per-sample seeding.
using ArchEvaluator = std::function<double(const ArchitectureDescriptor& desc, std::size_t index)>;

/// Samples `n` architectures with `seed`, scores each, keeps the first best.
RandomSearchResult random_search_baseline(const SupernetConfig& space, int n, std::uint64_t seed,
                                          const ArchEvaluator& evaluate);

extern template class SearchEngine<float>;
extern template class SearchEngine<double>;

}  // namespace posenas
