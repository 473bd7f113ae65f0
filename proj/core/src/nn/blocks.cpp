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

#include "posenas/nn/blocks.hpp"

#include <stdexcept>
#include <string>

namespace posenas {
namespace {

std::string join(const std::string& prefix, const std::string& name) {
  return prefix.empty() ? name : prefix + "." + name;
}

}  // namespace

void MBConvSpec::validate() const {
  if (kernel != 3 && kernel != 5 && kernel != 7) {
    throw std::invalid_argument("MBConv: kernel " + std::to_string(kernel) +
                                " not in allowed set {3, 5, 7}");
  }
  if (expansion != 3 && expansion != 6) {
    throw std::invalid_argument("MBConv: expansion " + std::to_string(expansion) +
                                " not in allowed set {3, 6}");
  }
  if (stride != 1 && stride != 2) {
    throw std::invalid_argument("MBConv: stride " + std::to_string(stride) + " not in {1, 2}");
  }
  if (in_channels <= 0 || out_channels <= 0) {
    throw std::invalid_argument("MBConv: channel counts must be positive");
  }
}

std::size_t conv_weight_count(const ConvSpec& spec) { return shape_numel(spec.weight_shape()); }

template <typename T>
MBConv<T>::MBConv(const MBConvSpec& spec, Rng& rng)
    : spec_((spec.validate(), spec)),
      expand_(spec.expand_conv(), true, rng),
      depthwise_(spec.depthwise_conv(), true, rng),
      project_(spec.project_conv(), false, rng) {}

template <typename T>
Tensor<T> MBConv<T>::forward(const Tensor<T>& x) {
  Tensor<T> y = project_.forward(depthwise_.forward(expand_.forward(x)));
  return spec_.has_residual() ? add(y, x) : y;
}

template <typename T>
Shape MBConv<T>::output_shape(const Shape& in) const {
  return project_.output_shape(depthwise_.output_shape(expand_.output_shape(in)));
}

template <typename T>
void MBConv<T>::collect(const std::string& prefix, StateDict<T>& out) {
  expand_.collect(join(prefix, "expand"), out);
  depthwise_.collect(join(prefix, "dw"), out);
  project_.collect(join(prefix, "project"), out);
}

template <typename T>
void MBConv<T>::set_norm_mode(NormMode mode) {
  expand_.set_norm_mode(mode);
  depthwise_.set_norm_mode(mode);
  project_.set_norm_mode(mode);
}

template <typename T>
SepDepth<T>::SepDepth(int kernel, int in_channels, int out_channels, int stride, Rng& rng)
    : depthwise_(ConvSpec::depthwise(kernel, in_channels, stride), true, rng),
      pointwise_(ConvSpec::pointwise(in_channels, out_channels), false, rng) {}

template <typename T>
Tensor<T> SepDepth<T>::forward(const Tensor<T>& x) {
  return pointwise_.forward(depthwise_.forward(x));
}

template <typename T>
Shape SepDepth<T>::output_shape(const Shape& in) const {
  return pointwise_.output_shape(depthwise_.output_shape(in));
}

template <typename T>
void SepDepth<T>::collect(const std::string& prefix, StateDict<T>& out) {
  depthwise_.collect(join(prefix, "dw"), out);
  pointwise_.collect(join(prefix, "pw"), out);
}

template <typename T>
void SepDepth<T>::set_norm_mode(NormMode mode) {
  depthwise_.set_norm_mode(mode);
  pointwise_.set_norm_mode(mode);
}

template <typename T>
std::unique_ptr<MBConv<T>> build_mbconv(const MBConvSpec& spec, Rng& rng) {
  return std::make_unique<MBConv<T>>(spec, rng);
}

template <typename T>
std::unique_ptr<SepDepth<T>> build_sepdepth(int kernel, int in_channels, int out_channels,
                                            int stride, Rng& rng) {
  if (kernel % 2 == 0) {
    throw std::invalid_argument("SepDepth: kernel must be odd, got " + std::to_string(kernel));
  }
  return std::make_unique<SepDepth<T>>(kernel, in_channels, out_channels, stride, rng);
}

template class MBConv<float>;
template class MBConv<double>;
template class SepDepth<float>;
template class SepDepth<double>;
template std::unique_ptr<MBConv<float>> build_mbconv<float>(const MBConvSpec&, Rng&);
template std::unique_ptr<MBConv<double>> build_mbconv<double>(const MBConvSpec&, Rng&);
template std::unique_ptr<SepDepth<float>> build_sepdepth<float>(int, int, int, int, Rng&);
template std::unique_ptr<SepDepth<double>> build_sepdepth<double>(int, int, int, int, Rng&);

}  // namespace posenas
