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
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace posenas {

/// Ordered dimension list. 4-D tensors follow NCHW.
using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

namespace detail {

template <typename T>
struct TensorImpl {
  Shape shape;
  std::vector<T> value;
  std::vector<T> grad;  // sized like value iff requires_grad
  bool requires_grad = false;
};

}  // namespace detail

/// Dense n-dimensional array with optional participation in a gradient tape.
///
/// A Tensor is a cheap handle: copies share the underlying storage, the way
/// parameters are shared between a module and the optimizer that updates it.
/// Use `detached()` for an independent deep copy.
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;
  explicit Tensor(Shape shape, bool requires_grad = false);
  Tensor(Shape shape, std::vector<T> values, bool requires_grad = false);

  static Tensor scalar(T v, bool requires_grad = false);
  static Tensor full(Shape shape, T v, bool requires_grad = false);

  bool defined() const { return impl_ != nullptr; }
  const Shape& shape() const { return impl_->shape; }
  std::size_t rank() const { return impl_->shape.size(); }
  std::size_t dim(std::size_t i) const { return impl_->shape.at(i); }
  std::size_t numel() const { return impl_->value.size(); }
  bool is_scalar() const { return defined() && numel() == 1; }

  std::span<T> values() { return impl_->value; }
  std::span<const T> values() const { return impl_->value; }
  T& operator[](std::size_t i) { return impl_->value[i]; }
  const T& operator[](std::size_t i) const { return impl_->value[i]; }

  bool requires_grad() const { return impl_ && impl_->requires_grad; }
  /// Enabling allocates a zeroed gradient buffer; disabling releases it.
  void set_requires_grad(bool on);
  std::span<T> grad() { return impl_->grad; }
  std::span<const T> grad() const { return impl_->grad; }
  void zero_grad();

  /// Value of a one-element tensor.
  T item() const;

  Tensor detached() const;
  bool shares_storage_with(const Tensor& other) const { return impl_ == other.impl_; }

  const std::shared_ptr<detail::TensorImpl<T>>& impl() const { return impl_; }

 private:
  std::shared_ptr<detail::TensorImpl<T>> impl_;
};

/// A tensor with a stable hierarchical name, e.g. "layers.3.cand.1.expand.weight".
template <typename T>
struct NamedTensor {
  std::string name;
  Tensor<T> tensor;
};

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace posenas
