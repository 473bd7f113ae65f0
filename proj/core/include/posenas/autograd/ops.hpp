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

// Differentiable primitives. Binary elementwise primitives accept either
// identical shapes or a one-element operand (scalar broadcast); nothing else
// broadcasts. Shape errors throw std::invalid_argument naming the primitive
// and both shapes.

namespace posenas {

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);
template <typename T>
Tensor<T> scale(const Tensor<T>& a, T factor);
template <typename T>
Tensor<T> relu6(const Tensor<T>& a);
template <typename T>
Tensor<T> log(const Tensor<T>& a);
template <typename T>
Tensor<T> sum(const Tensor<T>& a);

/// Softmax of a 1-D vector, stabilised by subtracting the maximum.
template <typename T>
Tensor<T> softmax(const Tensor<T>& logits);

/// out = sum_i weights[i] * tensors[i]. `weights` is 1-D with one entry per
/// tensor; all tensors share one shape.
template <typename T>
Tensor<T> weighted_sum(const Tensor<T>& weights, std::span<const Tensor<T>> tensors);

/// Squared error between two equally shaped tensors. For NCHW input the sum
/// of squared differences is divided by N*C, i.e. the mean over samples and
/// channels of the per-map squared L2 norm; otherwise by the element count.
template <typename T>
Tensor<T> mse(const Tensor<T>& pred, const Tensor<T>& target);

enum class NormMode {
  kBatchStats,        // normalise with batch statistics, update running stats
  kBatchStatsFrozen,  // normalise with batch statistics, leave running stats
  kRunningStats,      // normalise with the running statistics
};

struct NormOptions {
  NormMode mode = NormMode::kBatchStats;
  double momentum = 0.1;
  double eps = 1e-5;
};

/// Channelwise affine normalisation over an NCHW tensor.
/// `running_mean`/`running_var` have one entry per channel.
template <typename T>
Tensor<T> batch_norm(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta,
                     std::span<T> running_mean, std::span<T> running_var,
                     const NormOptions& options);

}  // namespace posenas
