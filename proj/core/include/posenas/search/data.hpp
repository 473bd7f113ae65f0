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
#include <span>
#include <vector>

#include "posenas/autograd/tensor.hpp"

namespace posenas {

/// Input/target pairs of fixed CHW shapes, stored as float.
struct TensorDataset {
  Shape input_shape;   // [C, H, W]
  Shape target_shape;  // [K, h, w]
  std::vector<std::vector<float>> inputs;
  std::vector<std::vector<float>> targets;

  std::size_t size() const { return inputs.size(); }
  /// Appends one pair, checking both sizes.
  void add(std::vector<float> input, std::vector<float> target);
};

/// Stacks the selected samples into NCHW input and target tensors.
template <typename T>
std::pair<Tensor<T>, Tensor<T>> make_batch(const TensorDataset& data, std::span<const std::size_t> indices);

/// Index partition of a dataset.
struct SplitDataset {
  std::vector<std::size_t> train;  // weight training
  std::vector<std::size_t> val;    // architecture updates
  std::uint64_t seed = 0;
};

/// Shuffles 0..n-1 with `seed` and puts round(n * fraction) indices in
/// `train`. Throws for n == 0 or a fraction outside (0, 1).
SplitDataset split_dataset(std::size_t n, double fraction, std::uint64_t seed);

/// Consecutive batches of a freshly shuffled copy of `indices`.
std::vector<std::vector<std::size_t>> shuffled_batches(std::vector<std::size_t> indices, std::size_t batch_size,
                                                       std::uint64_t seed);

}  // namespace posenas
