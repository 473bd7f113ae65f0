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

#include "posenas/nn/blocks.hpp"

namespace posenas {

/// One candidate operation of a searchable layer: an MBConv setting or skip.
/// Width and stride come from the layer the candidate sits in.
struct OpSpec {
  enum class Kind { kMBConv, kSkip };

  Kind kind = Kind::kMBConv;
  int kernel = 3;
  int expansion = 3;

  static OpSpec mbconv(int kernel, int expansion) { return {Kind::kMBConv, kernel, expansion}; }
  static OpSpec skip() { return {Kind::kSkip, 0, 0}; }

  bool is_skip() const { return kind == Kind::kSkip; }
  /// Cost-table identifier: "mbconv_k<k>_e<e>" or "skip".
  std::string id() const;
  /// Accepts only canonical ids of the k{3,5,7} x e{3,6} family.
  static OpSpec from_id(const std::string& id);

  bool operator==(const OpSpec&) const = default;
};

/// The kernel x expansion cross product, kernels outermost.
std::vector<OpSpec> mbconv_grid(const std::vector<int>& kernels, const std::vector<int>& expansions);

/// Geometry of one searchable layer.
struct LayerGeometry {
  int index = 0;
  int stage = 1;
  int in_channels = 1;
  int out_channels = 1;
  int stride = 1;
  int in_size = 1;  // square spatial extent of the input

  bool skip_admissible() const { return stride == 1 && in_channels == out_channels; }
  int out_size() const { return (in_size + stride - 1) / stride; }
  MBConvSpec mbconv(const OpSpec& op) const {
    return {op.kernel, op.expansion, stride, in_channels, out_channels};
  }
};

}  // namespace posenas
