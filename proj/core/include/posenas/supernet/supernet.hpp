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
#include <optional>
#include <vector>

#include "posenas/arch/head.hpp"
#include "posenas/nn/module.hpp"
#include "posenas/supernet/op_spec.hpp"

namespace posenas {

struct StageSpec {
  int width = 1;
  int first_stride = 2;
  int layers = 1;

  bool operator==(const StageSpec&) const = default;
};

struct SupernetConfig {
  int input_size = 256;
  StemConfig stem;
  std::vector<StageSpec> stages;
  std::vector<OpSpec> candidates = mbconv_grid({3, 5, 7}, {3, 6});
  bool allow_skip = true;
  int downsamplings = 4;  // stride-2 positions, stem included
  HeadConfig head;

  /// Backbone search space "small" at 256x256 input, K = 16.
  static SupernetConfig small();
  /// `small()` with widths divided by 4 (min 4, rounded to even), at most
  /// two layers per stage, 64x64 input, head widths (32, 16) and K = 8.
  static SupernetConfig desk();
  static SupernetConfig scaled(const SupernetConfig& base, int divisor, int max_layers_per_stage);

  void validate() const;
  std::vector<LayerGeometry> layers() const;
  int head_input_channels() const;
  int head_input_size() const;

  bool operator==(const SupernetConfig&) const = default;
};

/// Sampled drop-path state of one layer.
struct PathSample {
  std::vector<bool> active;
  std::vector<double> probs;  // renormalised over survivors, 0 for dropped
};

/// p_o = exp(a_o) / sum exp(a_o'); throws on non-finite entries.
template <typename T>
Tensor<T> layer_probs(const Tensor<T>& alpha);

/// A searchable layer: candidate operations mixed by softmax(alpha).
template <typename T>
class MixedLayer : public Module<T> {
 public:
  MixedLayer(LayerGeometry geometry, std::vector<OpSpec> ops, std::vector<ModulePtr<T>> candidates);

  /// Builds the MBConv candidates, plus skip when admissible and allowed.
  static std::unique_ptr<MixedLayer> build(const LayerGeometry& geometry,
                                           const std::vector<OpSpec>& mbconv_candidates,
                                           bool allow_skip, Rng& rng);

  /// Full mixture sum_o p_o * o(x).
  Tensor<T> forward(const Tensor<T>& x) override;
  /// Mixture over the surviving paths with constant renormalised weights.
  Tensor<T> forward(const Tensor<T>& x, const PathSample& sample);
  Shape output_shape(const Shape& in) const override;
  void collect(const std::string& prefix, StateDict<T>& out) override;
  void set_norm_mode(NormMode mode) override;

  Tensor<T> probs() const { return layer_probs(alpha_); }
  Tensor<T>& alpha() { return alpha_; }
  const Tensor<T>& alpha() const { return alpha_; }
  const LayerGeometry& geometry() const { return geometry_; }
  const std::vector<OpSpec>& ops() const { return ops_; }
  std::size_t size() const { return candidates_.size(); }
  Module<T>& candidate(std::size_t i) { return *candidates_[i]; }

 private:
  LayerGeometry geometry_;
  std::vector<OpSpec> ops_;
  std::vector<ModulePtr<T>> candidates_;
  Tensor<T> alpha_;
};

/// Independently drops each candidate with probability `drop_rate`,
/// resampling until at least one survives.
template <typename T>
PathSample drop_path(const MixedLayer<T>& layer, double drop_rate, Rng& rng);

/// stem -> mixed layers -> head.
template <typename T>
class Supernet {
 public:
  Supernet(ModulePtr<T> stem, std::vector<std::unique_ptr<MixedLayer<T>>> layers, ModulePtr<T> head,
           std::optional<SupernetConfig> config = std::nullopt);

  Tensor<T> forward(const Tensor<T>& x);
  /// Weight-phase forward: drop-path sampled independently per layer.
  Tensor<T> forward_sampled(const Tensor<T>& x, double drop_rate, Rng& rng);
  Shape output_shape(const Shape& in) const;

  std::vector<Tensor<T>> weight_parameters();
  std::vector<Tensor<T>> arch_parameters();
  StateDict<T> state();
  void set_norm_mode(NormMode mode);

  std::size_t num_layers() const { return layers_.size(); }
  MixedLayer<T>& layer(std::size_t i) { return *layers_[i]; }
  const MixedLayer<T>& layer(std::size_t i) const { return *layers_[i]; }
  Module<T>& stem() { return *stem_; }
  Module<T>& head() { return *head_; }
  const std::optional<SupernetConfig>& config() const { return config_; }

 private:
  ModulePtr<T> stem_;
  std::vector<std::unique_ptr<MixedLayer<T>>> layers_;
  ModulePtr<T> head_;
  std::optional<SupernetConfig> config_;
};

template <typename T>
Supernet<T> build_supernet(const SupernetConfig& config, Rng& rng);

extern template class MixedLayer<float>;
extern template class MixedLayer<double>;
extern template class Supernet<float>;
extern template class Supernet<double>;

}  // namespace posenas
