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

#include "posenas/search/data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace posenas {

void TensorDataset::add(std::vector<float> input, std::vector<float> target) {
  if (input.size() != shape_numel(input_shape) || target.size() != shape_numel(target_shape)) {
    throw std::invalid_argument("TensorDataset: sample does not match " + shape_str(input_shape) + " / " +
                                shape_str(target_shape));
  }
  inputs.push_back(std::move(input));
  targets.push_back(std::move(target));
}

template <typename T>
std::pair<Tensor<T>, Tensor<T>> make_batch(const TensorDataset& data, std::span<const std::size_t> indices) {
  if (indices.empty()) throw std::invalid_argument("make_batch: empty batch");
  const std::size_t in = shape_numel(data.input_shape), tg = shape_numel(data.target_shape);
  std::vector<T> x, y;
  x.reserve(in * indices.size());
  y.reserve(tg * indices.size());
  for (auto i : indices) {
    if (i >= data.size()) throw std::out_of_range("make_batch: sample index " + std::to_string(i) + " out of range");
    x.insert(x.end(), data.inputs[i].begin(), data.inputs[i].end());
    y.insert(y.end(), data.targets[i].begin(), data.targets[i].end());
  }
  Shape xs{indices.size()}, ys{indices.size()};
  xs.insert(xs.end(), data.input_shape.begin(), data.input_shape.end());
  ys.insert(ys.end(), data.target_shape.begin(), data.target_shape.end());
  return {Tensor<T>(xs, std::move(x)), Tensor<T>(ys, std::move(y))};
}

SplitDataset split_dataset(std::size_t n, double fraction, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("split_dataset: empty dataset");
  if (!(fraction > 0 && fraction < 1)) throw std::invalid_argument("split_dataset: fraction must lie in (0, 1)");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  const auto cut = static_cast<std::size_t>(std::llround(static_cast<double>(n) * fraction));
  SplitDataset s;
  s.train.assign(idx.begin(), idx.begin() + static_cast<long>(cut));
  s.val.assign(idx.begin() + static_cast<long>(cut), idx.end());
  s.seed = seed;
  return s;
}

std::vector<std::vector<std::size_t>> shuffled_batches(std::vector<std::size_t> indices, std::size_t batch_size,
                                                       std::uint64_t seed) {
  if (batch_size == 0) throw std::invalid_argument("shuffled_batches: batch size must be positive");
  std::mt19937_64 rng(seed);
  std::shuffle(indices.begin(), indices.end(), rng);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < indices.size(); i += batch_size) {
    out.emplace_back(indices.begin() + static_cast<long>(i),
                     indices.begin() + static_cast<long>(std::min(indices.size(), i + batch_size)));
  }
  return out;
}

template std::pair<Tensor<float>, Tensor<float>> make_batch<float>(const TensorDataset&, std::span<const std::size_t>);
template std::pair<Tensor<double>, Tensor<double>> make_batch<double>(const TensorDataset&, std::span<const std::size_t>);

}  // namespace posenas
