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

#include <stdexcept>
#include <string>
#include <vector>

#include "posenas/arch/head.hpp"
#include "posenas/supernet/op_spec.hpp"

namespace posenas {

struct LayerChoice {
  int index = 0;
  int stage = 1;
  OpSpec op;
  int width = 0;   // unused for skip
  int stride = 1;  // unused for skip

  bool operator==(const LayerChoice&) const = default;
};

/// A discrete architecture. Skip layers are recorded but absent from the
/// built network.
struct ArchitectureDescriptor {
  int version = 1;
  int input_h = 256;
  int input_w = 256;
  StemConfig stem;  // stem.input_channels is the image channel count
  std::vector<LayerChoice> layers;
  HeadConfig head;

  /// Throws ArchParseError (line 0) describing the first broken invariant.
  void validate(int expected_downsamplings = 4) const;
  int stride2_count() const;
  /// Channel count entering the head (last surviving layer's width).
  int head_input_channels() const;
  /// Surviving MBConv layers with their block specs, in order.
  std::vector<MBConvSpec> surviving_blocks() const;

  bool operator==(const ArchitectureDescriptor&) const = default;
};

class ArchParseError : public std::runtime_error {
 public:
  ArchParseError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Canonical text form:
///   efficientpose-arch v1
///   input <H> <W> <C>
///   stem conv3 <width> s2 ; sepdepth3 <width> s1
///   layer <idx> stage <s> mbconv k<k> e<e> w<width> s<stride>
///   layer <idx> stage <s> skip
///   head tconv <w1> tconv <w2> sic <0|1> style <plain|sep|ir> k <K>
/// A trailing "deconv <k>" on the head line is emitted only when the
/// transposed-conv kernel differs from 4.
std::string serialize(const ArchitectureDescriptor& desc);

/// Whitespace tolerant; '#' starts a comment line. A negative
/// `expected_downsamplings` accepts any stride-2 count.
ArchitectureDescriptor parse_architecture(const std::string& text, int expected_downsamplings = 4);

}  // namespace posenas
