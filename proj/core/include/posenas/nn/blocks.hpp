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

#include "posenas/nn/module.hpp"

namespace posenas {

/// Inverted residual block settings.
struct MBConvSpec {
  int kernel = 3;     // {3, 5, 7}
  int expansion = 6;  // {3, 6}
  int stride = 1;     // {1, 2}
  int in_channels = 1;
  int out_channels = 1;

  int expanded() const { return expansion * in_channels; }
  bool has_residual() const { return stride == 1 && in_channels == out_channels; }
  void validate() const;

  ConvSpec expand_conv() const { return ConvSpec::pointwise(in_channels, expanded()); }
  ConvSpec depthwise_conv() const { return ConvSpec::depthwise(kernel, expanded(), stride); }
  ConvSpec project_conv() const { return ConvSpec::pointwise(expanded(), out_channels); }

  bool operator==(const MBConvSpec&) const = default;
};

/// Number of weights in one convolution.
std::size_t conv_weight_count(const ConvSpec& spec);

/// expand 1x1 -> norm/ReLU6 -> depthwise kxk stride s -> norm/ReLU6 ->
/// project 1x1 -> norm, plus the identity when has_residual().
template <typename T>
class MBConv : public Module<T> {
 public:
  MBConv(const MBConvSpec& spec, Rng& rng);

  Tensor<T> forward(const Tensor<T>& x) override;
  Shape output_shape(const Shape& in) const override;
  void collect(const std::string& prefix, StateDict<T>& out) override;
  void set_norm_mode(NormMode mode) override;

  const MBConvSpec& spec() const { return spec_; }
  ConvNorm<T>& expand() { return expand_; }
  ConvNorm<T>& depthwise() { return depthwise_; }
  ConvNorm<T>& project() { return project_; }

 private:
  MBConvSpec spec_;
  ConvNorm<T> expand_;
  ConvNorm<T> depthwise_;
  ConvNorm<T> project_;
};

/// depthwise kxk stride s -> norm/ReLU6 -> pointwise -> norm.
template <typename T>
class SepDepth : public Module<T> {
 public:
  SepDepth(int kernel, int in_channels, int out_channels, int stride, Rng& rng);

  Tensor<T> forward(const Tensor<T>& x) override;
  Shape output_shape(const Shape& in) const override;
  void collect(const std::string& prefix, StateDict<T>& out) override;
  void set_norm_mode(NormMode mode) override;

  ConvNorm<T>& depthwise() { return depthwise_; }
  ConvNorm<T>& pointwise() { return pointwise_; }

 private:
  ConvNorm<T> depthwise_;
  ConvNorm<T> pointwise_;
};

/// Validates the spec (allowed kernels {3,5,7}, expansions {3,6}).
template <typename T>
std::unique_ptr<MBConv<T>> build_mbconv(const MBConvSpec& spec, Rng& rng);

/// Throws for an even kernel.
template <typename T>
std::unique_ptr<SepDepth<T>> build_sepdepth(int kernel, int in_channels, int out_channels,
                                            int stride, Rng& rng);

extern template class MBConv<float>;
extern template class MBConv<double>;
extern template class SepDepth<float>;
extern template class SepDepth<double>;

}  // namespace posenas
