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

#include "posenas/nn/module.hpp"

#include <cmath>
#include <stdexcept>

namespace posenas {
namespace {

std::string join(const std::string& prefix, const std::string& name) {
  return prefix.empty() ? name : prefix + "." + name;
}

double fan_in(const ConvSpec& spec) {
  const double k2 = static_cast<double>(spec.kernel) * spec.kernel;
  switch (spec.kind) {
    case ConvKind::kDepthwise: return k2;
    case ConvKind::kPointwise: return spec.in_channels;
    case ConvKind::kTransposed: return spec.in_channels * k2 / (spec.stride * spec.stride);
    case ConvKind::kPlain: break;
  }
  return spec.in_channels * k2;
}

}  // namespace

template <typename T>
std::vector<Tensor<T>> Module<T>::parameters() {
  StateDict<T> sd;
  collect("", sd);
  std::vector<Tensor<T>> out;
  out.reserve(sd.parameters.size());
  for (auto& p : sd.parameters) out.push_back(p.tensor);
  return out;
}

template <typename T>
StateDict<T> Module<T>::state(const std::string& prefix) {
  StateDict<T> sd;
  collect(prefix, sd);
  return sd;
}

template <typename T>
std::size_t Module<T>::parameter_count() {
  std::size_t n = 0;
  for (const auto& p : parameters()) n += p.numel();
  return n;
}

template <typename T>
Conv<T>::Conv(const ConvSpec& spec, Rng& rng) : spec_(spec) {
  spec_.validate();
  const Shape ws = spec_.weight_shape();
  std::vector<T> w(shape_numel(ws));
  const double bound = std::sqrt(3.0 / fan_in(spec_));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (T& v : w) v = static_cast<T>(dist(rng));
  weight_ = Tensor<T>(ws, std::move(w), true);
}

template <typename T>
Tensor<T> Conv<T>::forward(const Tensor<T>& x) {
  return conv_forward(spec_, weight_, x);
}

template <typename T>
void Conv<T>::collect(const std::string& prefix, StateDict<T>& out) {
  out.parameters.push_back({join(prefix, "weight"), weight_});
}

template <typename T>
BatchNorm<T>::BatchNorm(int channels)
    : channels_(channels),
      gamma_(Tensor<T>::full({static_cast<std::size_t>(channels)}, T(1), true)),
      beta_(Tensor<T>::full({static_cast<std::size_t>(channels)}, T(0), true)),
      running_mean_(Tensor<T>::full({static_cast<std::size_t>(channels)}, T(0))),
      running_var_(Tensor<T>::full({static_cast<std::size_t>(channels)}, T(1))) {
  if (channels <= 0) throw std::invalid_argument("BatchNorm: channels must be positive");
}

template <typename T>
Tensor<T> BatchNorm<T>::forward(const Tensor<T>& x) {
  return batch_norm(x, gamma_, beta_, running_mean_.values(), running_var_.values(), options_);
}

template <typename T>
Shape BatchNorm<T>::output_shape(const Shape& in) const {
  if (in.size() != 4 || in[1] != static_cast<std::size_t>(channels_)) {
    throw std::invalid_argument("batch_norm: input " + shape_str(in) + " does not have " +
                                std::to_string(channels_) + " channels");
  }
  return in;
}

template <typename T>
void BatchNorm<T>::collect(const std::string& prefix, StateDict<T>& out) {
  out.parameters.push_back({join(prefix, "gamma"), gamma_});
  out.parameters.push_back({join(prefix, "beta"), beta_});
  out.buffers.push_back({join(prefix, "running_mean"), running_mean_});
  out.buffers.push_back({join(prefix, "running_var"), running_var_});
}

template <typename T>
Shape Upsample2x<T>::output_shape(const Shape& in) const {
  if (in.size() != 4) throw std::invalid_argument("upsample: expected NCHW, got " + shape_str(in));
  return {in[0], in[1], 2 * in[2], 2 * in[3]};
}

template <typename T>
Sequential<T>& Sequential<T>::add(std::string name, ModulePtr<T> m) {
  items_.push_back({std::move(name), std::move(m)});
  return *this;
}

template <typename T>
Tensor<T> Sequential<T>::forward(const Tensor<T>& x) {
  Tensor<T> h = x;
  for (auto& item : items_) h = item.module->forward(h);
  return h;
}

template <typename T>
Shape Sequential<T>::output_shape(const Shape& in) const {
  Shape s = in;
  for (const auto& item : items_) s = item.module->output_shape(s);
  return s;
}

template <typename T>
void Sequential<T>::collect(const std::string& prefix, StateDict<T>& out) {
  for (auto& item : items_) item.module->collect(join(prefix, item.name), out);
}

template <typename T>
void Sequential<T>::set_norm_mode(NormMode mode) {
  for (auto& item : items_) item.module->set_norm_mode(mode);
}

template <typename T>
ConvNorm<T>::ConvNorm(const ConvSpec& spec, bool activation, Rng& rng)
    : conv_(spec, rng), norm_(spec.out_channels), activation_(activation) {}

template <typename T>
Tensor<T> ConvNorm<T>::forward(const Tensor<T>& x) {
  Tensor<T> y = norm_.forward(conv_.forward(x));
  return activation_ ? relu6(y) : y;
}

template <typename T>
void ConvNorm<T>::collect(const std::string& prefix, StateDict<T>& out) {
  conv_.collect(join(prefix, "conv"), out);
  norm_.collect(join(prefix, "norm"), out);
}

template class Module<float>;
template class Module<double>;
template class Conv<float>;
template class Conv<double>;
template class BatchNorm<float>;
template class BatchNorm<double>;
template class Upsample2x<float>;
template class Upsample2x<double>;
template class Sequential<float>;
template class Sequential<double>;
template class ConvNorm<float>;
template class ConvNorm<double>;

}  // namespace posenas
