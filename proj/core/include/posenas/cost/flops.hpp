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
#include <vector>

#include "posenas/arch/descriptor.hpp"
#include "posenas/arch/head.hpp"
#include "posenas/nn/blocks.hpp"
#include "posenas/supernet/op_spec.hpp"

namespace posenas {

// All counts are multiply-accumulates on a single CHW input. Normalisation,
// activations, residual adds and nearest upsampling are free.
//
//   plain      Ho*Wo * Cout * Cin * k^2
//   depthwise  Ho*Wo * C * k^2
//   pointwise  H*W * Cin * Cout
//   transposed see TransposedCounting

/// How a stride-2 transposed convolution is charged.
enum class TransposedCounting {
  kInputTaps,     // Hi*Wi * Cin * Cout * k^2: every real multiply
  kZeroInsertion  // Ho*Wo * Cin * Cout * k^2: dense conv over the zero-stuffed input
};

struct FlopsOptions {
  TransposedCounting transposed = TransposedCounting::kInputTaps;
};

using Macs = std::uint64_t;

/// `chw` is [C, H, W]; throws std::invalid_argument on a rank or channel
/// mismatch.
Macs flops_of(const ConvSpec& conv, const Shape& chw, FlopsOptions opts = {});
Macs flops_of(const MBConvSpec& block, const Shape& chw);
/// Skip costs 0.
Macs flops_of(const OpSpec& op, const LayerGeometry& geometry);
Macs stem_flops(const StemConfig& stem, const Shape& chw);
Macs head_flops(const HeadConfig& head, const Shape& chw, FlopsOptions opts = {});
/// The SIC depthwise alone, on the head output of `chw`.
Macs sic_flops(const HeadConfig& head, const Shape& chw);

struct FlopsBreakdown {
  Macs stem = 0;
  std::vector<Macs> layers;  // one per descriptor layer, 0 for skip
  Macs head = 0;

  Macs backbone() const;  // stem + layers
  Macs total() const { return backbone() + head; }
};

FlopsBreakdown flops_of(const ArchitectureDescriptor& desc, FlopsOptions opts = {});

inline double to_mflops(Macs macs) { return static_cast<double>(macs) / 1e6; }

}  // namespace posenas
