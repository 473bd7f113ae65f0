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
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "posenas/autograd/ops.hpp"
#include "posenas/autograd/tensor.hpp"
#include "posenas/nn/conv.hpp"

namespace posenas {

using Rng = std::mt19937_64;

/// Learnable tensors and buffers (running statistics) of a module tree.
template <typename T>
struct StateDict {
  std::vector<NamedTensor<T>> parameters;
  std::vector<NamedTensor<T>> buffers;
};

template <typename T>
class Module {
 public:
  virtual ~Module() = default;

  virtual Tensor<T> forward(const Tensor<T>& x) = 0;
  /// Dry-run shape inference; throws on the same conditions forward would.
  virtual Shape output_shape(const Shape& in) const = 0;
  virtual void collect(const std::string& prefix, StateDict<T>& out) = 0;
  virtual void set_norm_mode(NormMode) {}

  std::vector<Tensor<T>> parameters();
  StateDict<T> state(const std::string& prefix = "");
  std::size_t parameter_count();
};

template <typename T>
using ModulePtr = std::unique_ptr<Module<T>>;

/// Convolution with fan-in scaled uniform initialisation.
template <typename T>
class Conv : public Module<T> {
 public:
  Conv(const ConvSpec& spec, Rng& rng);

  Tensor<T> forward(const Tensor<T>& x) override;
  Shape output_shape(const Shape& in) const override { return spec_.output_shape(in); }
  void collect(const std::string& prefix, StateDict<T>& out) override;

  const ConvSpec& spec() const { return spec_; }
  Tensor<T>& weight() { return weight_; }

 private:
  ConvSpec spec_;
  Tensor<T> weight_;
};

/// Channelwise affine normalisation: scale 1, shift 0, running var 1.
template <typename T>
class BatchNorm : public Module<T> {
 public:
  explicit BatchNorm(int channels);

  Tensor<T> forward(const Tensor<T>& x) override;
  Shape output_shape(const Shape& in) const override;
  void collect(const std::string& prefix, StateDict<T>& out) override;
  void set_norm_mode(NormMode mode) override { options_.mode = mode; }

  Tensor<T>& gamma() { return gamma_; }
  Tensor<T>& beta() { return beta_; }
  Tensor<T>& running_mean() { return running_mean_; }
  Tensor<T>& running_var() { return running_var_; }

 private:
  int channels_;
  Tensor<T> gamma_, beta_, running_mean_, running_var_;
  NormOptions options_;
};

template <typename T>
class Relu6 : public Module<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x) override { return relu6(x); }
  Shape output_shape(const Shape& in) const override { return in; }
  void collect(const std::string&, StateDict<T>&) override {}
};

template <typename T>
class Identity : public Module<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x) override { return x; }
  Shape output_shape(const Shape& in) const override { return in; }
  void collect(const std::string&, StateDict<T>&) override {}
};

template <typename T>
class Upsample2x : public Module<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x) override { return upsample_nearest2x(x); }
  Shape output_shape(const Shape& in) const override;
  void collect(const std::string&, StateDict<T>&) override {}
};

/// Named chain of modules.
template <typename T>
class Sequential : public Module<T> {
 public:
  Sequential& add(std::string name, ModulePtr<T> m);
  template <typename M, typename... Args>
  M& emplace(std::string name, Args&&... args) {
    auto m = std::make_unique<M>(std::forward<Args>(args)...);
    M& ref = *m;
    add(std::move(name), std::move(m));
    return ref;
  }

  Tensor<T> forward(const Tensor<T>& x) override;
  Shape output_shape(const Shape& in) const override;
  void collect(const std::string& prefix, StateDict<T>& out) override;
  void set_norm_mode(NormMode mode) override;

  std::size_t size() const { return items_.size(); }
  Module<T>& at(std::size_t i) { return *items_[i].module; }
  const std::string& name_at(std::size_t i) const { return items_[i].name; }

 private:
  struct Item {
    std::string name;
    ModulePtr<T> module;
  };
  std::vector<Item> items_;
};

/// conv -> norm [-> ReLU6]
template <typename T>
class ConvNorm : public Module<T> {
 public:
  ConvNorm(const ConvSpec& spec, bool activation, Rng& rng);

  Tensor<T> forward(const Tensor<T>& x) override;
  Shape output_shape(const Shape& in) const override { return conv_.output_shape(in); }
  void collect(const std::string& prefix, StateDict<T>& out) override;
  void set_norm_mode(NormMode mode) override { norm_.set_norm_mode(mode); }

  Conv<T>& conv() { return conv_; }
  BatchNorm<T>& norm() { return norm_; }

 private:
  Conv<T> conv_;
  BatchNorm<T> norm_;
  bool activation_;
};

extern template class Module<float>;
extern template class Module<double>;
extern template class Conv<float>;
extern template class Conv<double>;
extern template class BatchNorm<float>;
extern template class BatchNorm<double>;
extern template class Sequential<float>;
extern template class Sequential<double>;
extern template class ConvNorm<float>;
extern template class ConvNorm<double>;

}  // namespace posenas
