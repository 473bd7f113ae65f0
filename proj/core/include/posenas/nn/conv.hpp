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

#include <cstddef>
#include <string>
#include <vector>

#include "posenas/autograd/tensor.hpp"

namespace posenas {

enum class ConvKind { kPlain, kDepthwise, kPointwise, kTransposed };

std::string to_string(ConvKind kind);

/// One convolution layer. Padding is derived: floor(k/2) for odd kernels,
/// (k - 2) / 2 for stride-2 transposed convolutions (k=4 gives padding 1).
/// No convolution carries a bias; normalisation provides the shift.
struct ConvSpec {
  ConvKind kind = ConvKind::kPlain;
  int kernel = 3;
  int stride = 1;
  int in_channels = 1;
  int out_channels = 1;

  static ConvSpec plain(int k, int in, int out, int stride = 1);
  static ConvSpec depthwise(int k, int channels, int stride = 1);
  static ConvSpec pointwise(int in, int out);
  static ConvSpec transposed(int in, int out, int k = 4);

  int padding() const;
  /// Throws std::invalid_argument when the spec breaks a kind's invariants.
  void validate() const;
  Shape weight_shape() const;
  /// NCHW output shape for an NCHW input; validates channels and extent.
  Shape output_shape(const Shape& in) const;

  bool operator==(const ConvSpec&) const = default;
};

// Raw convolution primitives, differentiable w.r.t. both x and w.
// Weight layouts: conv2d [Cout, Cin, k, k]; depthwise [C, 1, k, k];
// conv_transpose2d [Cin, Cout, k, k].

template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& w, int stride, int padding);
template <typename T>
Tensor<T> depthwise_conv2d(const Tensor<T>& x, const Tensor<T>& w, int stride, int padding);
template <typename T>
Tensor<T> pointwise_conv2d(const Tensor<T>& x, const Tensor<T>& w);
template <typename T>
Tensor<T> conv_transpose2d(const Tensor<T>& x, const Tensor<T>& w, int stride, int padding);
template <typename T>
Tensor<T> upsample_nearest2x(const Tensor<T>& x);

/// Dispatches on `spec.kind` after validating it against x and w.
template <typename T>
Tensor<T> conv_forward(const ConvSpec& spec, const Tensor<T>& w, const Tensor<T>& x);

/// Per-pixel tap counts of a k x k, stride-s transposed convolution with an
/// all-ones kernel applied to an all-ones extent x extent input, no padding.
struct CoverageGrid {
  int size = 0;  // (extent - 1) * s + k
  std::vector<int> counts;  // row-major size x size

  int at(int row, int col) const { return counts[static_cast<std::size_t>(row * size + col)]; }
  /// Pixels reachable by every kernel phase: [k - 1, (extent - 1) * s].
  int interior_begin = 0;
  int interior_end = 0;  // inclusive
};

CoverageGrid transposed_overlap_pattern(int k, int s, int extent);

}  // namespace posenas
